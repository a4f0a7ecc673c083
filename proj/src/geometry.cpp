#include "collimetric/geometry.hpp"

#include <algorithm>

#include "collimetric/error.hpp"

namespace collimetric {

Aabb bounding_box(const PointCloud& cloud) {
    if (cloud.empty()) {
        throw Error(ErrorKind::empty_cloud, "bounding_box: cloud is empty");
    }
    Aabb box{cloud.points.front(), cloud.points.front()};
    for (const Point3& p : cloud.points) {
        box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
        box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
    }
    return box;
}

DirectionFrame build_frame(Vec3 direction) {
    const double length = norm(direction);
    if (!(length > 1e-9)) {
        throw Error(ErrorKind::invalid_argument, "build_frame: direction must be a nonzero vector");
    }
    DirectionFrame frame;
    frame.d = (1.0 / length) * direction;
    const Vec3 c = cross(frame.d, Vec3{0.0, 0.0, 1.0});
    const double c_len = norm(c);
    if (c_len < 1e-6) {
        // Near-vertical: world x with its d component removed, exactly x when d = +-z.
        const Vec3 x = Vec3{1.0, 0.0, 0.0} - frame.d.x * frame.d;
        frame.u = (1.0 / norm(x)) * x;
    } else {
        frame.u = (1.0 / c_len) * c;
    }
    frame.v = cross(frame.d, frame.u);
    return frame;
}

PointCloud merge(const PointCloud& a, const PointCloud& b) {
    PointCloud out;
    out.points.reserve(a.size() + b.size());
    out.points.insert(out.points.end(), a.points.begin(), a.points.end());
    out.points.insert(out.points.end(), b.points.begin(), b.points.end());
    const bool a_colored = a.has_colors() || a.empty();
    const bool b_colored = b.has_colors() || b.empty();
    if (a_colored && b_colored && (a.has_colors() || b.has_colors())) {
        out.colors.reserve(out.points.size());
        out.colors.insert(out.colors.end(), a.colors.begin(), a.colors.end());
        out.colors.insert(out.colors.end(), b.colors.begin(), b.colors.end());
    }
    return out;
}

} // namespace collimetric
