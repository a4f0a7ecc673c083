#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "collimetric/geometry.hpp"

namespace collimetric {

// Deterministic synthetic scenes. Everything is z-up: objects rest on the
// z = 0 plane and extend towards +z. All generators throw
// ErrorKind::invalid_argument on non-positive sizes or spacings.

/// Lattice of (floor(w/s)+1) x (floor(h/s)+1) points at z = 0, centered on the origin.
PointCloud plane_scene(double width, double height, double spacing);

/// Appends lattice samples of a box's top face and four side faces (the
/// bottom rests on the ground and is not sampled). Edges shared by two faces
/// are sampled once per face.
PointCloud add_box(PointCloud cloud, Point3 center, Vec3 size, double spacing);

/// Number of points add_box appends.
std::size_t box_sample_count(Vec3 size, double spacing);

/// Appends the lateral surface and top cap of a vertical cylinder standing on `base`.
PointCloud add_rod(PointCloud cloud, Point3 base, double diameter, double height, double spacing);

/// Removes points whose XY distance to (x, y) is <= radius. Survivors keep their order.
PointCloud punch_hole(PointCloud cloud, double x, double y, double radius);

/// Appends `count` points uniform in the axis-aligned cube of side `size` around `center`.
PointCloud add_ghost_blob(PointCloud cloud, Point3 center, double size, std::size_t count,
                          std::uint64_t seed);

/// Independent Gaussian perturbation of every coordinate.
PointCloud add_noise(PointCloud cloud, double sigma, std::uint64_t seed);

/// Keeps each point independently with probability keep_fraction.
PointCloud subsample(PointCloud cloud, double keep_fraction, std::uint64_t seed);

struct BoxSpec {
    Point3 center;
    Vec3 size;
    friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

struct RodSpec {
    Point3 base;
    double diameter = 0.0;
    double height = 0.0;
    friend bool operator==(const RodSpec&, const RodSpec&) = default;
};

struct HoleSpec {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    friend bool operator==(const HoleSpec&, const HoleSpec&) = default;
};

struct GhostSpec {
    Point3 center;
    double size = 0.0;
    std::size_t count = 0;
    friend bool operator==(const GhostSpec&, const GhostSpec&) = default;
};

/// A whole scene: optional ground plane, objects, then degradations applied
/// in the order holes, ghosts, subsample, noise.
struct SceneSpec {
    bool plane = true;
    double width = 100.0;
    double height = 100.0;
    double spacing = 1.0;
    std::uint64_t seed = 0;
    std::vector<BoxSpec> boxes;
    std::vector<RodSpec> rods;
    std::vector<HoleSpec> holes;
    std::vector<GhostSpec> ghosts;
    double keep_fraction = 1.0;
    double noise_sigma = 0.0;

    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

PointCloud generate_scene(const SceneSpec& spec);

/// Key-value text, one `key = value` per line, `#` comments. Repeatable keys
/// (box, rod, hole, ghost) append. Unknown keys are ErrorKind::parse with the
/// key in the message.
SceneSpec parse_scene_spec(std::string_view text);
std::string format_scene_spec(const SceneSpec& spec);

} // namespace collimetric
