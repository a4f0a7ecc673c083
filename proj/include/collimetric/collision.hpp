#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "collimetric/geometry.hpp"
#include "collimetric/parallel.hpp"
#include "collimetric/spatial_index.hpp"

namespace collimetric {

/// Cuboid end-effector. Cross-section length x width lies in the plane
/// perpendicular to motion (length along the frame's u, width along v);
/// height is the extent along the motion direction. All in mm.
struct GripperSpec {
    double length = 10.0;
    double width = 10.0;
    double height = 10.0;

    friend bool operator==(const GripperSpec&, const GripperSpec&) = default;
};

/// Inputs of a collision evaluation. Defaults are the reference setup:
/// 10 mm Z tolerance, 10x10x10 mm gripper, 5 mm grid step, outlier
/// thresholds 15 (ground truth) and 5 (query), single direction +Z.
struct EvalConfig {
    double t_z = 10.0;
    GripperSpec gripper;
    double g_step = 5.0;
    std::size_t n_gt = 15;
    std::size_t n_q = 5;
    std::vector<Vec3> directions{Vec3{0.0, 0.0, 1.0}};

    /// Throws ErrorKind::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

/// Lattice of descent paths in the plane perpendicular to a direction.
struct PathGrid {
    DirectionFrame frame;
    double origin_a = 0.0;
    double origin_b = 0.0;
    double step = 0.0;
    std::size_t cols = 0;
    std::size_t rows = 0;

    std::size_t size() const { return cols * rows; }
    std::size_t flat(std::size_t i, std::size_t j) const { return j * cols + i; }
    double center_a(std::size_t i) const { return origin_a + static_cast<double>(i) * step; }
    double center_b(std::size_t j) const { return origin_b + static_cast<double>(j) * step; }
    /// Path center lifted to 3D with the gripper's leading face at depth t.
    Point3 world_point(std::size_t i, std::size_t j, double t) const;
};

/// Grid over the projected union bounding rectangle of both clouds, origin at
/// its min corner, floor(extent / step) + 1 paths per axis.
PathGrid build_path_grid(const PointCloud& gt, const PointCloud& query,
                         const DirectionFrame& frame, double g_step);
PathGrid build_path_grid(const ProjectedIndex& gt, const ProjectedIndex& query, double g_step);

/// Result of one simulated descent: the leading-face depth at first
/// collision, or nothing.
struct PathOutcome {
    std::optional<double> depth;

    bool collides() const { return depth.has_value(); }
    friend bool operator==(const PathOutcome&, const PathOutcome&) = default;
};

/// First depth at which more than `threshold` points lie inside a gripper of
/// the given height whose leading face sits at that depth, i.e. inside
/// [t - height, t]. `depths` must be ascending (ErrorKind::unsorted otherwise).
PathOutcome descend(std::span<const double> depths, double gripper_height, std::size_t threshold);

/// Row-major (j * cols + i) matrix of outcomes for a grid.
using OutcomeMatrix = std::vector<PathOutcome>;

/// Descends every grid path through `index`. The index frame must equal the
/// grid frame (ErrorKind::frame_mismatch).
OutcomeMatrix path_outcomes(const ProjectedIndex& index, const PathGrid& grid,
                            const GripperSpec& gripper, std::size_t threshold,
                            Parallelism par = {});

enum class PathLabel { aligned, fpc, fnc };

/// Candidate order for query matching: the path itself, then its four axis
/// neighbors.
enum class NeighborOffset { center, plus_i, minus_i, plus_j, minus_j };

inline constexpr std::array<NeighborOffset, 5> neighbor_order{
    NeighborOffset::center, NeighborOffset::plus_i, NeighborOffset::minus_i,
    NeighborOffset::plus_j, NeighborOffset::minus_j};

struct LabelDecision {
    PathLabel label = PathLabel::aligned;
    NeighborOffset matched = NeighborOffset::center;
    PathOutcome used;
};

/// Query candidates in neighbor_order; std::nullopt marks a neighbor outside the grid.
using QueryCandidates = std::array<std::optional<PathOutcome>, 5>;

/// Picks the candidate whose collision depth is closest to the ground truth
/// (both missing counts as distance 0, exactly one missing as infinite; ties
/// keep the earlier candidate). Within t_z of the ground truth the path is
/// aligned; otherwise the chosen candidate decides between FPC (query hits
/// first, or only the query hits) and FNC.
LabelDecision label_path(const PathOutcome& gt, const QueryCandidates& query, double t_z);

/// FC = 1 - 2(1 - r_fnc)(1 - r_fpc) / (2 - r_fnc - r_fpc), with FC = 1 at
/// r_fnc = r_fpc = 1. Rates outside [0, 1] are ErrorKind::invalid_argument.
double collision_fscore(double r_fnc, double r_fpc);

struct PathRecord {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t direction_index = 0;
    PathOutcome gt;
    PathOutcome query_used;
    NeighborOffset matched = NeighborOffset::center;
    PathLabel label = PathLabel::aligned;
    /// Where the labeled collision happens: query depth for FPC, ground-truth
    /// depth otherwise; absent when neither cloud collides.
    std::optional<Point3> world_point;
};

struct LabelCounts {
    std::size_t n_total = 0;
    std::size_t n_fpc = 0;
    std::size_t n_fnc = 0;
    std::size_t n_aligned = 0;

    void add(PathLabel label);
    LabelCounts& operator+=(const LabelCounts& other);
    double r_fpc() const;
    double r_fnc() const;
    double fc() const { return collision_fscore(r_fnc(), r_fpc()); }

    friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

struct DirectionReport {
    Vec3 direction;  // as configured, not normalized
    std::size_t cols = 0;
    std::size_t rows = 0;
    LabelCounts counts;

    double r_fpc() const { return counts.r_fpc(); }
    double r_fnc() const { return counts.r_fnc(); }
    double fc() const { return counts.fc(); }
};

struct CollisionReport {
    EvalConfig config;
    std::vector<DirectionReport> directions;
    /// Counts pooled over all directions; rates are taken over the pooled total.
    LabelCounts pooled;

    double r_fpc() const { return pooled.r_fpc(); }
    double r_fnc() const { return pooled.r_fnc(); }
    double fc() const { return pooled.fc(); }
};

/// Tolerance-independent part of one direction's evaluation.
struct DirectionOutcomes {
    std::size_t direction_index = 0;
    Vec3 direction;
    PathGrid grid;
    OutcomeMatrix gt;
    OutcomeMatrix query;
};

DirectionOutcomes simulate_direction(const PointCloud& gt, const PointCloud& query,
                                     const EvalConfig& config, Vec3 direction,
                                     std::size_t direction_index = 0, Parallelism par = {});

struct DirectionResult {
    std::vector<PathRecord> records;
    DirectionReport report;
};

/// Labels every path of a simulated direction at tolerance t_z.
DirectionResult label_direction(const DirectionOutcomes& outcomes, double t_z);

DirectionResult evaluate_direction(const PointCloud& gt, const PointCloud& query,
                                   const EvalConfig& config, Vec3 direction,
                                   Parallelism par = {});

struct Evaluation {
    CollisionReport report;
    std::vector<PathRecord> records;  // all directions, in direction order
};

Evaluation evaluate_with_records(const PointCloud& gt, const PointCloud& query,
                                 const EvalConfig& config, Parallelism par = {});

CollisionReport evaluate(const PointCloud& gt, const PointCloud& query,
                         const EvalConfig& config, Parallelism par = {});

struct SweepPoint {
    double t_z = 0.0;
    CollisionReport report;
};

/// One report per tolerance; outcomes are simulated once and relabeled.
using SweepSeries = std::vector<SweepPoint>;

/// tz_values must be strictly increasing and non-negative
/// (ErrorKind::unsorted / ErrorKind::invalid_argument).
SweepSeries tolerance_sweep(const PointCloud& gt, const PointCloud& query,
                            const EvalConfig& config, std::span<const double> tz_values,
                            Parallelism par = {});

/// 1: +Z. 4: adds three directions tilted 30 degrees from +Z at azimuths
/// 0/120/240. 7: adds three more tilted 45 degrees at azimuths 60/180/300.
std::vector<Vec3> direction_preset(int count);

/// Reflects directions through the XY plane, for clouds whose up axis is +Z
/// (top-down motion is then -Z).
std::vector<Vec3> mirror_z(std::vector<Vec3> directions);

const char* to_string(PathLabel label);
const char* to_string(NeighborOffset offset);

} // namespace collimetric
