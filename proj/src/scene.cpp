#include "collimetric/scene.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "collimetric/error.hpp"
#include "collimetric/random.hpp"

namespace collimetric {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log finite.
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::invalid_argument, std::string(what) + " must be > 0");
    }
}

std::size_t lattice_count(double extent, double spacing) {
    // Small slack so extents that are exact multiples of the spacing keep their far edge.
    return static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
}

// Lattice positions centered on `center`.
double lattice_at(double center, std::size_t count, std::size_t k, double spacing) {
    return center + (static_cast<double>(k) - static_cast<double>(count - 1) / 2.0) * spacing;
}

} // namespace

PointCloud plane_scene(double width, double height, double spacing) {
    require_positive(width, "plane width");
    require_positive(height, "plane height");
    require_positive(spacing, "plane spacing");
    const std::size_t nx = lattice_count(width, spacing);
    const std::size_t ny = lattice_count(height, spacing);
    PointCloud cloud;
    cloud.points.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            cloud.points.push_back(
                {lattice_at(0.0, nx, i, spacing), lattice_at(0.0, ny, j, spacing), 0.0});
        }
    }
    return cloud;
}

std::size_t box_sample_count(Vec3 size, double spacing) {
    const std::size_t nx = lattice_count(size.x, spacing);
    const std::size_t ny = lattice_count(size.y, spacing);
    const std::size_t nz = lattice_count(size.z, spacing);
    return nx * ny + 2 * ny * nz + 2 * nx * nz;
}

PointCloud add_box(PointCloud cloud, Point3 center, Vec3 size, double spacing) {
    require_positive(size.x, "box size x");
    require_positive(size.y, "box size y");
    require_positive(size.z, "box size z");
    require_positive(spacing, "box spacing");
    cloud.colors.clear();
    const std::size_t nx = lattice_count(size.x, spacing);
    const std::size_t ny = lattice_count(size.y, spacing);
    const std::size_t nz = lattice_count(size.z, spacing);
    const double top = center.z + size.z / 2.0;
    cloud.points.reserve(cloud.size() + box_sample_count(size, spacing));

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            cloud.points.push_back(
                {lattice_at(center.x, nx, i, spacing), lattice_at(center.y, ny, j, spacing), top});
        }
    }
    for (const double side : {-1.0, 1.0}) {
        const double x = center.x + side * size.x / 2.0;
        for (std::size_t k = 0; k < nz; ++k) {
            for (std::size_t j = 0; j < ny; ++j) {
                cloud.points.push_back({x, lattice_at(center.y, ny, j, spacing),
                                        lattice_at(center.z, nz, k, spacing)});
            }
        }
    }
    for (const double side : {-1.0, 1.0}) {
        const double y = center.y + side * size.y / 2.0;
        for (std::size_t k = 0; k < nz; ++k) {
            for (std::size_t i = 0; i < nx; ++i) {
                cloud.points.push_back({lattice_at(center.x, nx, i, spacing), y,
                                        lattice_at(center.z, nz, k, spacing)});
            }
        }
    }
    return cloud;
}

PointCloud add_rod(PointCloud cloud, Point3 base, double diameter, double height, double spacing) {
    require_positive(diameter, "rod diameter");
    require_positive(height, "rod height");
    require_positive(spacing, "rod spacing");
    cloud.colors.clear();
    const double radius = diameter / 2.0;
    const auto ring = [&](double r, double z) {
        const auto n = std::max<std::size_t>(
            3, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * r / spacing)));
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            cloud.points.push_back({base.x + r * std::cos(angle), base.y + r * std::sin(angle), z});
        }
    };
    const std::size_t levels = lattice_count(height, spacing);
    for (std::size_t k = 0; k < levels; ++k) {
        ring(radius, base.z + std::min(height, static_cast<double>(k) * spacing));
    }
    const double top = base.z + height;
    if (static_cast<double>(levels - 1) * spacing < height) {
        ring(radius, top);
    }
    // Cap: center point plus concentric rings inside the rim.
    cloud.points.push_back({base.x, base.y, top});
    for (double r = spacing; r < radius - 1e-9; r += spacing) {
        ring(r, top);
    }
    return cloud;
}

PointCloud punch_hole(PointCloud cloud, double x, double y, double radius) {
    require_positive(radius, "hole radius");
    const double r2 = radius * radius;
    const auto inside = [&](const Point3& p) {
        const double dx = p.x - x;
        const double dy = p.y - y;
        return dx * dx + dy * dy <= r2;
    };
    PointCloud out;
    out.points.reserve(cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        if (!inside(cloud.points[k])) {
            out.points.push_back(cloud.points[k]);
            if (cloud.has_colors()) {
                out.colors.push_back(cloud.colors[k]);
            }
        }
    }
    return out;
}

PointCloud add_ghost_blob(PointCloud cloud, Point3 center, double size, std::size_t count,
                          std::uint64_t seed) {
    require_positive(size, "ghost blob size");
    if (count == 0) {
        throw Error(ErrorKind::invalid_argument, "ghost blob count must be >= 1");
    }
    cloud.colors.clear();
    Rng rng(seed);
    const double h = size / 2.0;
    cloud.points.reserve(cloud.size() + count);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = rng.uniform(center.x - h, center.x + h);
        const double y = rng.uniform(center.y - h, center.y + h);
        const double z = rng.uniform(center.z - h, center.z + h);
        cloud.points.push_back({x, y, z});
    }
    return cloud;
}

PointCloud add_noise(PointCloud cloud, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::invalid_argument, "noise sigma must be >= 0");
    }
    if (sigma == 0.0) {
        return cloud;
    }
    Rng rng(seed);
    for (Point3& p : cloud.points) {
        const double dx = rng.normal();
        const double dy = rng.normal();
        const double dz = rng.normal();
        p = p + sigma * Vec3{dx, dy, dz};
    }
    return cloud;
}

PointCloud subsample(PointCloud cloud, double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "keep fraction must lie in (0, 1]");
    }
    if (keep_fraction == 1.0) {
        return cloud;
    }
    Rng rng(seed);
    PointCloud out;
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        if (rng.uniform() < keep_fraction) {
            out.points.push_back(cloud.points[k]);
            if (cloud.has_colors()) {
                out.colors.push_back(cloud.colors[k]);
            }
        }
    }
    return out;
}

PointCloud generate_scene(const SceneSpec& spec) {
    require_positive(spec.spacing, "spacing");
    PointCloud cloud;
    if (spec.plane) {
        cloud = plane_scene(spec.width, spec.height, spec.spacing);
    }
    for (const BoxSpec& box : spec.boxes) {
        cloud = add_box(std::move(cloud), box.center, box.size, spec.spacing);
    }
    for (const RodSpec& rod : spec.rods) {
        cloud = add_rod(std::move(cloud), rod.base, rod.diameter, rod.height, spec.spacing);
    }
    for (const HoleSpec& hole : spec.holes) {
        cloud = punch_hole(std::move(cloud), hole.x, hole.y, hole.radius);
    }
    for (std::size_t k = 0; k < spec.ghosts.size(); ++k) {
        const GhostSpec& g = spec.ghosts[k];
        cloud = add_ghost_blob(std::move(cloud), g.center, g.size, g.count,
                               derive_seed(spec.seed, 100 + k));
    }
    cloud = subsample(std::move(cloud), spec.keep_fraction, derive_seed(spec.seed, 1));
    cloud = add_noise(std::move(cloud), spec.noise_sigma, derive_seed(spec.seed, 2));
    return cloud;
}

// ---------------------------------------------------------------- text form

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void spec_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorKind::parse, "scene spec line " + std::to_string(line) + ": " + what);
}

std::vector<double> numbers(std::string_view value, std::size_t expected, std::size_t line,
                            std::string_view key) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < value.size()) {
        while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\t' || value[pos] == ',')) {
            ++pos;
        }
        if (pos >= value.size()) {
            break;
        }
        std::size_t end = pos;
        while (end < value.size() && value[end] != ' ' && value[end] != '\t' && value[end] != ',') {
            ++end;
        }
        double v = 0.0;
        const auto token = value.substr(pos, end - pos);
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
            spec_fail(line, "invalid number '" + std::string(token) + "' for key '" +
                                std::string(key) + "'");
        }
        out.push_back(v);
        pos = end;
    }
    if (out.size() != expected) {
        spec_fail(line, "key '" + std::string(key) + "' expects " + std::to_string(expected) +
                            " values, got " + std::to_string(out.size()));
    }
    return out;
}

std::string fmt(double v) {
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

} // namespace

SceneSpec parse_scene_spec(std::string_view text) {
    SceneSpec spec;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            spec_fail(line_no, "expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "plane") {
            if (value == "true" || value == "on" || value == "1") {
                spec.plane = true;
            } else if (value == "false" || value == "off" || value == "0") {
                spec.plane = false;
            } else {
                spec_fail(line_no, "key 'plane' expects true or false");
            }
        } else if (key == "extent") {
            const auto v = numbers(value, 2, line_no, key);
            spec.width = v[0];
            spec.height = v[1];
        } else if (key == "spacing") {
            spec.spacing = numbers(value, 1, line_no, key)[0];
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                spec_fail(line_no, "key 'seed' expects an unsigned integer");
            }
            spec.seed = seed;
        } else if (key == "box") {
            const auto v = numbers(value, 6, line_no, key);
            spec.boxes.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
        } else if (key == "rod") {
            const auto v = numbers(value, 5, line_no, key);
            spec.rods.push_back({{v[0], v[1], v[2]}, v[3], v[4]});
        } else if (key == "hole") {
            const auto v = numbers(value, 3, line_no, key);
            spec.holes.push_back({v[0], v[1], v[2]});
        } else if (key == "ghost") {
            const auto v = numbers(value, 5, line_no, key);
            if (v[4] < 1.0 || v[4] != std::floor(v[4])) {
                spec_fail(line_no, "ghost count must be a positive integer");
            }
            spec.ghosts.push_back({{v[0], v[1], v[2]}, v[3], static_cast<std::size_t>(v[4])});
        } else if (key == "keep") {
            spec.keep_fraction = numbers(value, 1, line_no, key)[0];
        } else if (key == "noise") {
            spec.noise_sigma = numbers(value, 1, line_no, key)[0];
        } else {
            spec_fail(line_no, "unknown key '" + std::string(key) + "'");
        }
        if (end == text.size()) break;
    }
    return spec;
}

std::string format_scene_spec(const SceneSpec& spec) {
    std::ostringstream out;
    out << "plane = " << (spec.plane ? "true" : "false") << '\n';
    out << "extent = " << fmt(spec.width) << ' ' << fmt(spec.height) << '\n';
    out << "spacing = " << fmt(spec.spacing) << '\n';
    out << "seed = " << spec.seed << '\n';
    for (const BoxSpec& b : spec.boxes) {
        out << "box = " << fmt(b.center.x) << ' ' << fmt(b.center.y) << ' ' << fmt(b.center.z) << ' '
            << fmt(b.size.x) << ' ' << fmt(b.size.y) << ' ' << fmt(b.size.z) << '\n';
    }
    for (const RodSpec& r : spec.rods) {
        out << "rod = " << fmt(r.base.x) << ' ' << fmt(r.base.y) << ' ' << fmt(r.base.z) << ' '
            << fmt(r.diameter) << ' ' << fmt(r.height) << '\n';
    }
    for (const HoleSpec& h : spec.holes) {
        out << "hole = " << fmt(h.x) << ' ' << fmt(h.y) << ' ' << fmt(h.radius) << '\n';
    }
    for (const GhostSpec& g : spec.ghosts) {
        out << "ghost = " << fmt(g.center.x) << ' ' << fmt(g.center.y) << ' ' << fmt(g.center.z)
            << ' ' << fmt(g.size) << ' ' << g.count << '\n';
    }
    out << "keep = " << fmt(spec.keep_fraction) << '\n';
    out << "noise = " << fmt(spec.noise_sigma) << '\n';
    return out.str();
}

} // namespace collimetric
