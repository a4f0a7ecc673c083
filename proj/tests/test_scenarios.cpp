#include <doctest.h>

#include <cmath>

#include "collimetric/collision.hpp"
#include "collimetric/error.hpp"
#include "collimetric/scene.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace collimetric;

namespace {

PathLabel to_label(oracle::Label l) {
    switch (l) {
    case oracle::Label::fpc: return PathLabel::fpc;
    case oracle::Label::fnc: return PathLabel::fnc;
    default: return PathLabel::aligned;
    }
}

void check_against_oracle(const PointCloud& gt, const PointCloud& query, const EvalConfig& config,
                          Vec3 direction) {
    const oracle::OraclePaths ref = oracle::label_all(gt, query, config, direction);
    const DirectionResult got = evaluate_direction(gt, query, config, direction);
    REQUIRE(got.report.cols == ref.grid.cols);
    REQUIRE(got.report.rows == ref.grid.rows);
    REQUIRE(got.records.size() == ref.labels.size());
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < got.records.size(); ++k) {
        const PathRecord& r = got.records[k];
        if (r.j * ref.grid.cols + r.i != k || r.label != to_label(ref.labels[k]) || r.gt.depth != ref.gt[k]) {
            ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

} // namespace

TEST_CASE("missing box matches the brute-force oracle") {
    const auto scene = fixtures::missing_box(150);
    check_against_oracle(scene.gt, scene.query, fixtures::top_down_config(), fixtures::top_down);
    const DirectionResult r = evaluate_direction(scene.gt, scene.query, fixtures::top_down_config(),
                                                 fixtures::top_down);
    CHECK(r.report.counts.n_fpc == 0);
    CHECK(r.report.counts.n_fnc > 0);
    // every FNC path lies over the box, well above the plane
    for (const PathRecord& rec : r.records) {
        if (rec.label != PathLabel::fnc) continue;
        REQUIRE(rec.world_point.has_value());
        CHECK(std::abs(rec.world_point->x) <= 30.0);
        CHECK(std::abs(rec.world_point->y) <= 30.0);
        CHECK(rec.world_point->z > 10.0);
        CHECK(rec.world_point->z <= 50.0);
    }
}

TEST_CASE("ghost blob matches the brute-force oracle") {
    const auto scene = fixtures::ghost_blob(150);
    check_against_oracle(scene.gt, scene.query, fixtures::top_down_config(), fixtures::top_down);
    const DirectionResult r = evaluate_direction(scene.gt, scene.query, fixtures::top_down_config(),
                                                 fixtures::top_down);
    CHECK(r.report.counts.n_fnc == 0);
    CHECK(r.report.counts.n_fpc > 0);
    for (const PathRecord& rec : r.records) {
        if (rec.label != PathLabel::fpc) continue;
        REQUIRE(rec.world_point.has_value());
        CHECK(rec.world_point->z >= 90.0);
        CHECK(rec.world_point->z <= 110.0);
    }
}

TEST_CASE("tilted directions match the oracle") {
    const auto scene = fixtures::occluded_wall();
    EvalConfig config = fixtures::top_down_config();
    check_against_oracle(scene.gt, scene.query, config, fixtures::tilted_45());
    check_against_oracle(scene.gt, scene.query, config, {0.2, 0.5, -1.0});
}

TEST_CASE("self evaluation is zero for every preset") {
    PointCloud c = add_rod(add_box(plane_scene(120, 80, 2), {10, 5, 15}, {30, 20, 30}, 2), {-30, 0, 0}, 6, 40, 2);
    c = add_noise(std::move(c), 0.5, 3);
    for (int preset : {1, 4, 7}) {
        EvalConfig config;
        config.directions = mirror_z(direction_preset(preset));
        config.n_gt = config.n_q = 5;
        const CollisionReport r = evaluate(c, c, config);
        CHECK(r.pooled.n_aligned == r.pooled.n_total);
        CHECK(r.r_fpc() == 0.0);
        CHECK(r.r_fnc() == 0.0);
        CHECK(r.fc() == 0.0);
        CHECK(r.directions.size() == static_cast<std::size_t>(preset));
    }
}

TEST_CASE("single direction report equals evaluate_direction") {
    const auto scene = fixtures::missing_box(120);
    const EvalConfig config = fixtures::top_down_config();
    const CollisionReport pooled = evaluate(scene.gt, scene.query, config);
    const DirectionResult single = evaluate_direction(scene.gt, scene.query, config, fixtures::top_down);
    CHECK(pooled.pooled == single.report.counts);
    CHECK(pooled.fc() == single.report.fc());
}

TEST_CASE("pooling across directions adds counts") {
    const auto scene = fixtures::missing_box(120);
    EvalConfig config = fixtures::top_down_config();
    config.directions = {fixtures::top_down, {0.5, 0.0, -1.0}};
    const Evaluation ev = evaluate_with_records(scene.gt, scene.query, config);
    const DirectionResult a = evaluate_direction(scene.gt, scene.query, config, config.directions[0]);
    const DirectionResult b = evaluate_direction(scene.gt, scene.query, config, config.directions[1]);
    REQUIRE(ev.report.directions.size() == 2);
    CHECK(ev.report.directions[0].counts == a.report.counts);
    CHECK(ev.report.directions[1].counts == b.report.counts);
    const std::size_t fnc = a.report.counts.n_fnc + b.report.counts.n_fnc;
    const std::size_t total = a.report.counts.n_total + b.report.counts.n_total;
    CHECK(ev.report.pooled.n_total == total);
    CHECK(ev.report.r_fnc() == static_cast<double>(fnc) / static_cast<double>(total));
    CHECK(ev.records.size() == total);
    CHECK(ev.records.front().direction_index == 0);
    CHECK(ev.records.back().direction_index == 1);
}

TEST_CASE("less dense query plane is all aligned") {
    const PointCloud gt = plane_scene(99, 99, 1);
    const PointCloud query = plane_scene(99, 99, 3);
    const CollisionReport r = evaluate(gt, query, fixtures::top_down_config());
    CHECK(r.pooled.n_total > 0);
    CHECK(r.pooled.n_aligned == r.pooled.n_total);
}

TEST_CASE("small hole in the query is tolerated") {
    const PointCloud gt = plane_scene(100, 100, 1);
    const PointCloud query = punch_hole(gt, 0, 0, 2);
    REQUIRE(query.size() < gt.size());
    const CollisionReport r = evaluate(gt, query, fixtures::top_down_config());
    CHECK(r.pooled.n_fpc == 0);
    CHECK(r.pooled.n_fnc == 0);
}

TEST_CASE("large hole in the query is caught") {
    const PointCloud gt = plane_scene(100, 100, 1);
    const PointCloud query = punch_hole(gt, 0, 0, 15);
    const CollisionReport r = evaluate(gt, query, fixtures::top_down_config());
    CHECK(r.pooled.n_fnc > 0);
    CHECK(r.pooled.n_fpc == 0);
}

TEST_CASE("missing thin rod produces missed collisions") {
    const PointCloud plane = plane_scene(100, 100, 1);
    const PointCloud gt = add_rod(plane, {0, 0, 0}, 6, 40, 1);
    const CollisionReport r = evaluate(gt, plane, fixtures::top_down_config());
    CHECK(r.pooled.n_fnc > 0);
    CHECK(r.pooled.n_fpc == 0);
}

TEST_CASE("occluded wall sides only matter for tilted motion") {
    const auto scene = fixtures::occluded_wall();
    EvalConfig config = fixtures::top_down_config();
    const CollisionReport down = evaluate(scene.gt, scene.query, config);
    CHECK(down.pooled.n_fnc == 0);
    config.directions = {fixtures::tilted_45()};
    const CollisionReport tilted = evaluate(scene.gt, scene.query, config);
    CHECK(tilted.pooled.n_fnc > 0);
}

TEST_CASE("sweep is monotone and consistent with evaluate") {
    const std::vector<double> tz{2.5, 5, 7.5, 10, 12.5, 15, 17.5, 20};
    for (const auto& scene : {fixtures::ghost_blob(120), fixtures::missing_box(120)}) {
        const EvalConfig config = fixtures::top_down_config();
        const SweepSeries series = tolerance_sweep(scene.gt, scene.query, config, tz);
        REQUIRE(series.size() == tz.size());
        for (std::size_t k = 1; k < series.size(); ++k) {
            CHECK(series[k].t_z > series[k - 1].t_z);
            CHECK(series[k].report.pooled.n_fpc <= series[k - 1].report.pooled.n_fpc);
            CHECK(series[k].report.pooled.n_fnc <= series[k - 1].report.pooled.n_fnc);
        }
        const CollisionReport at_default = evaluate(scene.gt, scene.query, config);
        CHECK(series[3].t_z == config.t_z);
        CHECK(series[3].report.pooled == at_default.pooled);
        CHECK(series[3].report.config.t_z == config.t_z);
    }
}

TEST_CASE("lowered boxes flip to aligned as the tolerance passes each gap") {
    const auto scene = fixtures::lowered_boxes();
    const std::vector<double> tz{2.5, 5, 10, 15, 20};
    const SweepSeries series = tolerance_sweep(scene.gt, scene.query, fixtures::top_down_config(), tz);
    std::vector<std::size_t> fnc;
    for (const SweepPoint& p : series) {
        fnc.push_back(p.report.pooled.n_fnc);
        CHECK(p.report.pooled.n_fpc == 0);
    }
    for (std::size_t k = 1; k < fnc.size(); ++k) CHECK(fnc[k] < fnc[k - 1]);
    CHECK(fnc.back() == 0);
    check_against_oracle(scene.gt, scene.query, fixtures::top_down_config(), fixtures::top_down);
}

TEST_CASE("identical clouds sweep to zeros") {
    const PointCloud c = plane_scene(60, 60, 1);
    const std::vector<double> tz{0, 1, 2};
    for (const SweepPoint& p : tolerance_sweep(c, c, fixtures::top_down_config(), tz)) {
        CHECK(p.report.pooled.n_aligned == p.report.pooled.n_total);
    }
}

TEST_CASE("label flips only towards aligned as tolerance grows") {
    const auto scene = fixtures::ghost_blob(120);
    const DirectionOutcomes outcomes =
        simulate_direction(scene.gt, scene.query, fixtures::top_down_config(), fixtures::top_down);
    DirectionResult prev = label_direction(outcomes, 0.0);
    for (double tz = 0.5; tz <= 40; tz += 0.5) {
        const DirectionResult next = label_direction(outcomes, tz);
        for (std::size_t k = 0; k < next.records.size(); ++k) {
            if (prev.records[k].label == PathLabel::aligned) CHECK(next.records[k].label == PathLabel::aligned);
        }
        prev = next;
    }
}

TEST_CASE("results do not depend on the thread count") {
    const auto scene = fixtures::missing_box(150);
    EvalConfig config = fixtures::top_down_config();
    config.directions = mirror_z(direction_preset(4));
    const Evaluation one = evaluate_with_records(scene.gt, scene.query, config, {1});
    for (unsigned threads : {2u, 5u, 0u}) {
        const Evaluation many = evaluate_with_records(scene.gt, scene.query, config, {threads});
        CHECK(many.report.pooled == one.report.pooled);
        REQUIRE(many.records.size() == one.records.size());
        bool same = true;
        for (std::size_t k = 0; k < one.records.size(); ++k) {
            const PathRecord& a = one.records[k];
            const PathRecord& b = many.records[k];
            same = same && a.gt == b.gt && a.query_used == b.query_used && a.label == b.label &&
                   a.matched == b.matched;
        }
        CHECK(same);
    }
}

TEST_CASE("evaluate rejects empty clouds and bad configs") {
    const PointCloud c = plane_scene(10, 10, 1);
    CHECK_THROWS_AS(evaluate(PointCloud{}, c, {}), Error);
    CHECK_THROWS_AS(evaluate(c, PointCloud{}, {}), Error);
    EvalConfig bad;
    bad.g_step = -1;
    CHECK_THROWS_AS(evaluate(c, c, bad), Error);
}
