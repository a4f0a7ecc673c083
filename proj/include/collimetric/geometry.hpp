#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace collimetric {

/// 3-vector in millimeters. Used for both points and directions.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
    friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

    double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

using Point3 = Vec3;

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Squared Euclidean distance. Every nearest-neighbor path in the project
/// goes through this one expression so brute-force and indexed results agree
/// bit for bit.
constexpr double squared_distance(Vec3 a, Vec3 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline bool is_finite(Vec3 a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend constexpr bool operator==(Rgb, Rgb) = default;
};

/// Ordered list of points in millimeters, optionally colored.
/// `colors` is either empty or the same length as `points`.
struct PointCloud {
    std::vector<Point3> points;
    std::vector<Rgb> colors;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }
};

struct Aabb {
    Point3 min;
    Point3 max;

    bool contains(Point3 p) const {
        return p.x >= min.x && p.y >= min.y && p.z >= min.z &&
               p.x <= max.x && p.y <= max.y && p.z <= max.z;
    }
    bool contains(const Aabb& other) const { return contains(other.min) && contains(other.max); }
};

/// Throws ErrorKind::empty_cloud for an empty cloud.
Aabb bounding_box(const PointCloud& cloud);

/// Descent direction `d` plus an orthonormal basis (u, v) of the plane
/// perpendicular to it; (u, v, d) is right-handed.
struct DirectionFrame {
    Vec3 d;
    Vec3 u;
    Vec3 v;

    friend bool operator==(const DirectionFrame&, const DirectionFrame&) = default;
};

/// u = normalize(d x z). When |d x z| < 1e-6, u is the world x axis projected
/// off d, which is exactly x for d = +-z, so top-down grids line up with world
/// X/Y. Throws on a zero vector.
DirectionFrame build_frame(Vec3 direction);

/// Concatenates clouds; colors survive only when every input carries them.
PointCloud merge(const PointCloud& a, const PointCloud& b);

} // namespace collimetric
