#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "collimetric/error.hpp"
#include "collimetric/random.hpp"
#include "collimetric/scene.hpp"
#include "collimetric/spatial_index.hpp"
#include "oracles.hpp"

using namespace collimetric;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n, double extent) {
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        c.points.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                            rng.uniform(-extent, extent)});
    }
    return c;
}

std::vector<double> brute_footprint(const PointCloud& cloud, const DirectionFrame& f, double ca,
                                    double cb, double ha, double hb) {
    std::vector<double> out;
    for (const Point3& p : cloud.points) {
        if (std::abs(dot(p, f.u) - ca) <= ha && std::abs(dot(p, f.v) - cb) <= hb) {
            out.push_back(dot(p, f.d));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("nn: single point") {
    PointCloud c;
    c.points = {{0, 0, 0}};
    const NnIndex index = build_nn_index(c);
    CHECK(nearest_distance(index, {3, 4, 0}) == 5.0);
    CHECK(nearest_distance(index, {0, 0, 0}) == 0.0);
}

TEST_CASE("nn: two points") {
    PointCloud c;
    c.points = {{0, 0, 0}, {10, 0, 0}};
    CHECK(nearest_distance(build_nn_index(c), {6, 0, 0}) == 4.0);
}

TEST_CASE("nn: empty cloud throws") {
    try {
        build_nn_index(PointCloud{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_cloud);
    }
}

TEST_CASE("nn: matches linear scan exactly on 1e5 random points") {
    Rng rng(2024);
    const PointCloud c = random_cloud(rng, 100000, 500);
    const NnIndex index(c);
    for (int k = 0; k < 1000; ++k) {
        const Point3 q{rng.uniform(-600, 600), rng.uniform(-600, 600), rng.uniform(-600, 600)};
        CHECK(index.nearest_squared_distance(q) == oracle::nn_squared(q, c));
    }
}

TEST_CASE("nn: duplicates and lattice ties") {
    PointCloud c = plane_scene(20, 20, 1);
    const PointCloud copy = c;
    c.points.insert(c.points.end(), copy.points.begin(), copy.points.end());
    const NnIndex index(c);
    Rng rng(5);
    for (int k = 0; k < 500; ++k) {
        const Point3 q{std::round(rng.uniform(-12, 12) * 2) / 2, std::round(rng.uniform(-12, 12) * 2) / 2,
                       std::round(rng.uniform(-2, 2) * 2) / 2};
        CHECK(index.nearest_squared_distance(q) == oracle::nn_squared(q, c));
    }
}

TEST_CASE("projected: empty cloud answers nothing") {
    const ProjectedIndex index = build_projected_index(PointCloud{}, build_frame({0, 0, 1}), 10);
    CHECK(index.empty());
    CHECK(index.footprint_depths(0, 0, 5, 5).empty());
}

TEST_CASE("projected: nonpositive cell size throws") {
    PointCloud c;
    c.points = {{0, 0, 0}};
    for (double cell : {0.0, -1.0}) {
        try {
            build_projected_index(c, build_frame({0, 0, 1}), cell);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_argument);
        }
    }
}

TEST_CASE("projected: top-down plane is the identity projection") {
    const PointCloud plane = plane_scene(20, 20, 1);
    const DirectionFrame f = build_frame({0, 0, 1});
    for (const Point3& p : plane.points) {
        const ProjectedPoint pp = ProjectedIndex::project(f, p);
        CHECK(pp.a == p.x);
        CHECK(pp.b == p.y);
        CHECK(pp.t == 0.0);
    }
}

TEST_CASE("projected: tilted projection depth") {
    const DirectionFrame f = build_frame({1, 0, 1});
    const ProjectedPoint pp = ProjectedIndex::project(f, {1, 0, 1});
    CHECK(std::abs(pp.t - std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("projected: 10x10 footprint on a 1 mm plane holds 121 zeros") {
    const PointCloud plane = plane_scene(100, 100, 1);
    const ProjectedIndex index(plane, build_frame({0, 0, 1}), 10);
    const std::vector<double> depths = index.footprint_depths(0, 0, 5, 5);
    CHECK(depths.size() == 121);
    CHECK(std::all_of(depths.begin(), depths.end(), [](double t) { return t == 0.0; }));
}

TEST_CASE("projected: depths come back sorted") {
    PointCloud c;
    c.points = {{0, 0, 5}, {1, 1, 0}, {-1, 0, 20}, {50, 50, 1}};
    const ProjectedIndex index(c, build_frame({0, 0, 1}), 10);
    CHECK(index.footprint_depths(0, 0, 5, 5) == std::vector<double>{0, 5, 20});
    CHECK(index.footprint_depths(200, 200, 5, 5).empty());
}

TEST_CASE("projected: boundary points are included") {
    PointCloud c;
    c.points = {{5, 0, 1}, {-5, 5, 2}, {5.000001, 0, 3}, {0, -5, 4}};
    const ProjectedIndex index(c, build_frame({0, 0, 1}), 3);
    CHECK(index.footprint_depths(0, 0, 5, 5) == std::vector<double>{1, 2, 4});
}

TEST_CASE("projected: matches brute force on random rectangles") {
    Rng rng(77);
    for (const Vec3 dir : {Vec3{0, 0, 1}, Vec3{0, 0, -1}, Vec3{1, 0, 1}, Vec3{0.3, -0.8, 0.5}}) {
        const PointCloud c = random_cloud(rng, 4000, 100);
        const DirectionFrame f = build_frame(dir);
        for (double cell : {1.0, 10.0, 37.0}) {
            const ProjectedIndex index(c, f, cell);
            CHECK(index.size() == c.size());
            for (int k = 0; k < 250; ++k) {
                const double ca = rng.uniform(-180, 180);
                const double cb = rng.uniform(-180, 180);
                const double ha = rng.uniform(0.1, 40);
                const double hb = rng.uniform(0.1, 40);
                CHECK(index.footprint_depths(ca, cb, ha, hb) == brute_footprint(c, f, ca, cb, ha, hb));
            }
        }
    }
}

TEST_CASE("projected: very small cell size stays bounded") {
    Rng rng(3);
    const PointCloud c = random_cloud(rng, 1000, 1000);
    const DirectionFrame f = build_frame({0, 0, 1});
    const ProjectedIndex index(c, f, 1e-6);
    CHECK(index.footprint_depths(0, 0, 300, 300) == brute_footprint(c, f, 0, 0, 300, 300));
}
