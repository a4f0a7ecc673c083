#pragma once

#include <cstddef>
#include <optional>

#include "collimetric/geometry.hpp"
#include "collimetric/parallel.hpp"

namespace collimetric {

enum class HausdorffVariant { sum, max };

/// Mean squared nearest-neighbor distance in both directions, in mm^2.
double chamfer_distance(const PointCloud& p1, const PointCloud& p2, Parallelism par = {});

/// Largest nearest-neighbor distance from p1 to p2.
double one_sided_hausdorff(const PointCloud& p1, const PointCloud& p2, Parallelism par = {});

double hausdorff_distance(const PointCloud& p1, const PointCloud& p2,
                          HausdorffVariant variant = HausdorffVariant::sum, Parallelism par = {});

inline constexpr std::size_t default_emd_cap = 2000;

/// Minimum over bijections of the summed Euclidean distance. Equal sizes
/// required (ErrorKind::size_mismatch); larger than `cap` is ErrorKind::over_cap.
double emd_exact(const PointCloud& p1, const PointCloud& p2, std::size_t cap = default_emd_cap);

/// Fraction of query points strictly closer than d to gt.
double precision_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par = {});
/// Fraction of gt points strictly closer than d to query.
double recall_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par = {});
double fscore_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par = {});

/// Harmonic mean, 0 when both are 0.
double harmonic_fscore(double precision, double recall);

struct BaselineResult {
    double chamfer = 0.0;    // mm^2
    double hausdorff = 0.0;  // mm
    HausdorffVariant hausdorff_variant = HausdorffVariant::sum;
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
    double threshold_d = 0.0;  // mm
    std::optional<double> emd;  // mm
};

struct BaselineOptions {
    double threshold_d = 10.0;
    HausdorffVariant hausdorff_variant = HausdorffVariant::sum;
    bool with_emd = false;
    std::size_t emd_cap = default_emd_cap;
};

/// All baseline metrics at once, sharing two nearest-neighbor passes.
BaselineResult compute_baselines(const PointCloud& gt, const PointCloud& query,
                                 const BaselineOptions& options, Parallelism par = {});

} // namespace collimetric
