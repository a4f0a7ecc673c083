#include "collimetric/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "collimetric/error.hpp"

namespace collimetric {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_non_empty(const PointCloud& cloud, const char* role) {
    if (cloud.empty()) {
        throw Error(ErrorKind::empty_cloud, std::string(role) + " point cloud is empty");
    }
}

} // namespace

void EvalConfig::validate() const {
    const auto fail = [](const std::string& what) {
        throw Error(ErrorKind::invalid_argument, "invalid configuration: " + what);
    };
    if (!(t_z >= 0.0) || !std::isfinite(t_z)) fail("t_z must be >= 0");
    if (!positive_finite(gripper.length)) fail("gripper length must be > 0");
    if (!positive_finite(gripper.width)) fail("gripper width must be > 0");
    if (!positive_finite(gripper.height)) fail("gripper height must be > 0");
    if (!positive_finite(g_step)) fail("g_step must be > 0");
    if (directions.empty()) fail("at least one direction is required");
    for (const Vec3& d : directions) {
        if (!is_finite(d) || !(norm(d) > 1e-9)) fail("directions must be finite nonzero vectors");
    }
}

Point3 PathGrid::world_point(std::size_t i, std::size_t j, double t) const {
    return center_a(i) * frame.u + center_b(j) * frame.v + t * frame.d;
}

PathGrid build_path_grid(const ProjectedIndex& gt, const ProjectedIndex& query, double g_step) {
    if (!positive_finite(g_step)) {
        throw Error(ErrorKind::invalid_argument, "grid step must be > 0");
    }
    if (!(gt.frame() == query.frame())) {
        throw Error(ErrorKind::frame_mismatch, "path grid: indices use different frames");
    }
    if (gt.empty() || query.empty()) {
        throw Error(ErrorKind::empty_cloud, "path grid: both clouds must be non-empty");
    }
    const PlaneRect& g = gt.bounds();
    const PlaneRect& q = query.bounds();
    const double a_min = std::min(g.a_min, q.a_min);
    const double b_min = std::min(g.b_min, q.b_min);
    const double a_max = std::max(g.a_max, q.a_max);
    const double b_max = std::max(g.b_max, q.b_max);

    PathGrid grid;
    grid.frame = gt.frame();
    grid.origin_a = a_min;
    grid.origin_b = b_min;
    grid.step = g_step;
    grid.cols = static_cast<std::size_t>(std::floor((a_max - a_min) / g_step)) + 1;
    grid.rows = static_cast<std::size_t>(std::floor((b_max - b_min) / g_step)) + 1;
    return grid;
}

PathGrid build_path_grid(const PointCloud& gt, const PointCloud& query,
                         const DirectionFrame& frame, double g_step) {
    require_non_empty(gt, "ground-truth");
    require_non_empty(query, "query");
    // Bounds only; a single bin keeps construction cheap.
    const double wide = std::numeric_limits<double>::max();
    return build_path_grid(ProjectedIndex(gt, frame, wide), ProjectedIndex(query, frame, wide),
                           g_step);
}

PathOutcome descend(std::span<const double> depths, double gripper_height, std::size_t threshold) {
    if (!positive_finite(gripper_height)) {
        throw Error(ErrorKind::invalid_argument, "gripper height must be > 0");
    }
    if (!std::is_sorted(depths.begin(), depths.end())) {
        throw Error(ErrorKind::unsorted, "descend: depths must be sorted ascending");
    }
    // With the leading face at depths[j], the gripper holds depths[j - threshold .. j]
    // exactly when their span fits in its height.
    for (std::size_t j = threshold; j < depths.size(); ++j) {
        if (depths[j] - depths[j - threshold] <= gripper_height) {
            return {depths[j]};
        }
    }
    return {};
}

OutcomeMatrix path_outcomes(const ProjectedIndex& index, const PathGrid& grid,
                            const GripperSpec& gripper, std::size_t threshold, Parallelism par) {
    if (!(index.frame() == grid.frame)) {
        throw Error(ErrorKind::frame_mismatch, "path_outcomes: index and grid frames differ");
    }
    const double half_a = gripper.length / 2.0;
    const double half_b = gripper.width / 2.0;
    OutcomeMatrix out(grid.size());
    parallel_for(grid.rows, par, [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> depths;
        for (std::size_t j = row_begin; j < row_end; ++j) {
            for (std::size_t i = 0; i < grid.cols; ++i) {
                index.footprint_depths(grid.center_a(i), grid.center_b(j), half_a, half_b, depths);
                out[grid.flat(i, j)] = descend(depths, gripper.height, threshold);
            }
        }
    });
    return out;
}

LabelDecision label_path(const PathOutcome& gt, const QueryCandidates& query, double t_z) {
    if (!query[0]) {
        throw Error(ErrorKind::invalid_argument, "label_path: the center candidate is required");
    }
    const double inf = std::numeric_limits<double>::infinity();
    const auto gap = [&](const PathOutcome& q) {
        if (gt.collides() && q.collides()) {
            return std::abs(*gt.depth - *q.depth);
        }
        return gt.collides() == q.collides() ? 0.0 : inf;
    };

    std::size_t chosen = 0;
    double best = gap(*query[0]);
    for (std::size_t k = 1; k < query.size(); ++k) {
        if (query[k]) {
            const double g = gap(*query[k]);
            if (g < best) {
                best = g;
                chosen = k;
            }
        }
    }

    LabelDecision decision;
    decision.matched = neighbor_order[chosen];
    decision.used = *query[chosen];
    if (best <= t_z) {
        decision.label = PathLabel::aligned;
        return decision;
    }
    const PathOutcome& q = decision.used;
    if (q.collides() && (!gt.collides() || *q.depth < *gt.depth - t_z)) {
        decision.label = PathLabel::fpc;
    } else {
        // Ground truth collides and the query either misses or hits later than t_z.
        decision.label = PathLabel::fnc;
    }
    return decision;
}

double collision_fscore(double r_fnc, double r_fpc) {
    const auto in_range = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!in_range(r_fnc) || !in_range(r_fpc)) {
        throw Error(ErrorKind::invalid_argument, "collision_fscore: rates must lie in [0, 1]");
    }
    if (r_fnc == 1.0 && r_fpc == 1.0) {
        return 1.0;
    }
    return 1.0 - 2.0 * (1.0 - r_fnc) * (1.0 - r_fpc) / (2.0 - r_fnc - r_fpc);
}

void LabelCounts::add(PathLabel label) {
    ++n_total;
    switch (label) {
    case PathLabel::aligned: ++n_aligned; break;
    case PathLabel::fpc: ++n_fpc; break;
    case PathLabel::fnc: ++n_fnc; break;
    }
}

LabelCounts& LabelCounts::operator+=(const LabelCounts& other) {
    n_total += other.n_total;
    n_fpc += other.n_fpc;
    n_fnc += other.n_fnc;
    n_aligned += other.n_aligned;
    return *this;
}

double LabelCounts::r_fpc() const {
    return n_total == 0 ? 0.0 : static_cast<double>(n_fpc) / static_cast<double>(n_total);
}

double LabelCounts::r_fnc() const {
    return n_total == 0 ? 0.0 : static_cast<double>(n_fnc) / static_cast<double>(n_total);
}

DirectionOutcomes simulate_direction(const PointCloud& gt, const PointCloud& query,
                                     const EvalConfig& config, Vec3 direction,
                                     std::size_t direction_index, Parallelism par) {
    config.validate();
    require_non_empty(gt, "ground-truth");
    require_non_empty(query, "query");
    const DirectionFrame frame = build_frame(direction);
    const double cell = std::max(config.gripper.length, config.gripper.width);
    const ProjectedIndex gt_index(gt, frame, cell);
    const ProjectedIndex query_index(query, frame, cell);

    DirectionOutcomes out;
    out.direction_index = direction_index;
    out.direction = direction;
    out.grid = build_path_grid(gt_index, query_index, config.g_step);
    out.gt = path_outcomes(gt_index, out.grid, config.gripper, config.n_gt, par);
    out.query = path_outcomes(query_index, out.grid, config.gripper, config.n_q, par);
    return out;
}

DirectionResult label_direction(const DirectionOutcomes& outcomes, double t_z) {
    const PathGrid& grid = outcomes.grid;
    DirectionResult result;
    result.report.direction = outcomes.direction;
    result.report.cols = grid.cols;
    result.report.rows = grid.rows;
    result.records.reserve(grid.size());

    for (std::size_t j = 0; j < grid.rows; ++j) {
        for (std::size_t i = 0; i < grid.cols; ++i) {
            const auto at = [&](std::size_t ii, std::size_t jj) {
                return std::optional<PathOutcome>(outcomes.query[grid.flat(ii, jj)]);
            };
            QueryCandidates candidates{
                at(i, j),
                i + 1 < grid.cols ? at(i + 1, j) : std::nullopt,
                i > 0 ? at(i - 1, j) : std::nullopt,
                j + 1 < grid.rows ? at(i, j + 1) : std::nullopt,
                j > 0 ? at(i, j - 1) : std::nullopt,
            };
            const PathOutcome& gt = outcomes.gt[grid.flat(i, j)];
            const LabelDecision decision = label_path(gt, candidates, t_z);

            PathRecord record;
            record.i = i;
            record.j = j;
            record.direction_index = outcomes.direction_index;
            record.gt = gt;
            record.query_used = decision.used;
            record.matched = decision.matched;
            record.label = decision.label;
            if (decision.label == PathLabel::fpc) {
                record.world_point = grid.world_point(i, j, *decision.used.depth);
            } else if (gt.collides()) {
                record.world_point = grid.world_point(i, j, *gt.depth);
            }
            result.report.counts.add(record.label);
            result.records.push_back(record);
        }
    }
    return result;
}

DirectionResult evaluate_direction(const PointCloud& gt, const PointCloud& query,
                                   const EvalConfig& config, Vec3 direction, Parallelism par) {
    return label_direction(simulate_direction(gt, query, config, direction, 0, par), config.t_z);
}

Evaluation evaluate_with_records(const PointCloud& gt, const PointCloud& query,
                                 const EvalConfig& config, Parallelism par) {
    config.validate();
    Evaluation evaluation;
    evaluation.report.config = config;
    for (std::size_t k = 0; k < config.directions.size(); ++k) {
        DirectionResult result = label_direction(
            simulate_direction(gt, query, config, config.directions[k], k, par), config.t_z);
        evaluation.report.pooled += result.report.counts;
        evaluation.report.directions.push_back(result.report);
        evaluation.records.insert(evaluation.records.end(), result.records.begin(),
                                  result.records.end());
    }
    return evaluation;
}

CollisionReport evaluate(const PointCloud& gt, const PointCloud& query, const EvalConfig& config,
                         Parallelism par) {
    return evaluate_with_records(gt, query, config, par).report;
}

SweepSeries tolerance_sweep(const PointCloud& gt, const PointCloud& query,
                            const EvalConfig& config, std::span<const double> tz_values,
                            Parallelism par) {
    for (std::size_t k = 0; k < tz_values.size(); ++k) {
        if (!(tz_values[k] >= 0.0) || !std::isfinite(tz_values[k])) {
            throw Error(ErrorKind::invalid_argument, "tolerance sweep: t_z values must be >= 0");
        }
        if (k > 0 && !(tz_values[k] > tz_values[k - 1])) {
            throw Error(ErrorKind::unsorted,
                        "tolerance sweep: t_z values must be strictly increasing");
        }
    }
    config.validate();
    std::vector<DirectionOutcomes> simulated;
    simulated.reserve(config.directions.size());
    for (std::size_t k = 0; k < config.directions.size(); ++k) {
        simulated.push_back(simulate_direction(gt, query, config, config.directions[k], k, par));
    }

    SweepSeries series;
    series.reserve(tz_values.size());
    for (const double t_z : tz_values) {
        SweepPoint point;
        point.t_z = t_z;
        point.report.config = config;
        point.report.config.t_z = t_z;
        for (const DirectionOutcomes& outcomes : simulated) {
            const DirectionReport report = label_direction(outcomes, t_z).report;
            point.report.pooled += report.counts;
            point.report.directions.push_back(report);
        }
        series.push_back(std::move(point));
    }
    return series;
}

std::vector<Vec3> direction_preset(int count) {
    if (count != 1 && count != 4 && count != 7) {
        throw Error(ErrorKind::invalid_argument,
                    "direction preset must be 1, 4 or 7 (got " + std::to_string(count) + ")");
    }
    const auto tilted = [](double tilt_deg, double azimuth_deg) {
        const double tilt = tilt_deg * std::numbers::pi / 180.0;
        const double az = azimuth_deg * std::numbers::pi / 180.0;
        const Vec3 v{std::sin(tilt) * std::cos(az), std::sin(tilt) * std::sin(az), std::cos(tilt)};
        return (1.0 / norm(v)) * v;
    };
    std::vector<Vec3> out{Vec3{0.0, 0.0, 1.0}};
    if (count >= 4) {
        for (double az : {0.0, 120.0, 240.0}) out.push_back(tilted(30.0, az));
    }
    if (count == 7) {
        for (double az : {60.0, 180.0, 300.0}) out.push_back(tilted(45.0, az));
    }
    return out;
}

std::vector<Vec3> mirror_z(std::vector<Vec3> directions) {
    for (Vec3& d : directions) {
        d.z = -d.z;
    }
    return directions;
}

const char* to_string(PathLabel label) {
    switch (label) {
    case PathLabel::aligned: return "Aligned";
    case PathLabel::fpc: return "FPC";
    case PathLabel::fnc: return "FNC";
    }
    return "?";
}

const char* to_string(NeighborOffset offset) {
    switch (offset) {
    case NeighborOffset::center: return "center";
    case NeighborOffset::plus_i: return "+i";
    case NeighborOffset::minus_i: return "-i";
    case NeighborOffset::plus_j: return "+j";
    case NeighborOffset::minus_j: return "-j";
    }
    return "?";
}

} // namespace collimetric
