#include "collimetric/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "collimetric/assignment.hpp"
#include "collimetric/error.hpp"
#include "collimetric/spatial_index.hpp"

namespace collimetric {

namespace {

void require_non_empty(const PointCloud& cloud, const char* what) {
    if (cloud.empty()) {
        throw Error(ErrorKind::empty_cloud, std::string(what) + ": cloud is empty");
    }
}

void require_threshold(double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error(ErrorKind::invalid_argument, "distance threshold must be positive");
    }
}

// Squared distance from every point of `from` to its nearest neighbor in `to`,
// in point order.
std::vector<double> nn_squared(const PointCloud& from, const PointCloud& to, Parallelism par) {
    const NnIndex index(to);
    std::vector<double> out(from.size());
    parallel_for(from.size(), par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            out[k] = index.nearest_squared_distance(from.points[k]);
        }
    });
    return out;
}

double mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double max_distance(const std::vector<double>& squared) {
    return std::sqrt(*std::max_element(squared.begin(), squared.end()));
}

double fraction_within(const std::vector<double>& squared, double d) {
    std::size_t hits = 0;
    for (double s : squared) {
        if (std::sqrt(s) < d) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(squared.size());
}

} // namespace

double chamfer_distance(const PointCloud& p1, const PointCloud& p2, Parallelism par) {
    require_non_empty(p1, "chamfer_distance");
    require_non_empty(p2, "chamfer_distance");
    return mean(nn_squared(p1, p2, par)) + mean(nn_squared(p2, p1, par));
}

double one_sided_hausdorff(const PointCloud& p1, const PointCloud& p2, Parallelism par) {
    require_non_empty(p1, "hausdorff_distance");
    require_non_empty(p2, "hausdorff_distance");
    return max_distance(nn_squared(p1, p2, par));
}

double hausdorff_distance(const PointCloud& p1, const PointCloud& p2, HausdorffVariant variant,
                          Parallelism par) {
    const double forward = one_sided_hausdorff(p1, p2, par);
    const double backward = one_sided_hausdorff(p2, p1, par);
    return variant == HausdorffVariant::sum ? forward + backward : std::max(forward, backward);
}

double emd_exact(const PointCloud& p1, const PointCloud& p2, std::size_t cap) {
    if (p1.size() != p2.size()) {
        throw Error(ErrorKind::size_mismatch,
                    "emd: clouds must have equal sizes (" + std::to_string(p1.size()) + " vs " +
                        std::to_string(p2.size()) + ")");
    }
    if (p1.size() > cap) {
        throw Error(ErrorKind::over_cap, "emd: " + std::to_string(p1.size()) +
                                             " points exceeds the exact-solve cap of " +
                                             std::to_string(cap));
    }
    CostMatrix cost(p1.size());
    for (std::size_t r = 0; r < p1.size(); ++r) {
        for (std::size_t c = 0; c < p2.size(); ++c) {
            cost(r, c) = std::sqrt(squared_distance(p1.points[r], p2.points[c]));
        }
    }
    return solve_assignment(cost).total_cost;
}

double precision_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par) {
    require_non_empty(query, "precision_at");
    require_non_empty(gt, "precision_at");
    require_threshold(d);
    return fraction_within(nn_squared(query, gt, par), d);
}

double recall_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par) {
    return precision_at(gt, query, d, par);
}

double harmonic_fscore(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

double fscore_at(const PointCloud& query, const PointCloud& gt, double d, Parallelism par) {
    return harmonic_fscore(precision_at(query, gt, d, par), recall_at(query, gt, d, par));
}

BaselineResult compute_baselines(const PointCloud& gt, const PointCloud& query,
                                 const BaselineOptions& options, Parallelism par) {
    require_non_empty(gt, "baseline metrics");
    require_non_empty(query, "baseline metrics");
    require_threshold(options.threshold_d);

    const std::vector<double> query_to_gt = nn_squared(query, gt, par);
    const std::vector<double> gt_to_query = nn_squared(gt, query, par);

    BaselineResult result;
    result.chamfer = mean(gt_to_query) + mean(query_to_gt);
    const double forward = max_distance(gt_to_query);
    const double backward = max_distance(query_to_gt);
    result.hausdorff_variant = options.hausdorff_variant;
    result.hausdorff = options.hausdorff_variant == HausdorffVariant::sum
                           ? forward + backward
                           : std::max(forward, backward);
    result.threshold_d = options.threshold_d;
    result.precision = fraction_within(query_to_gt, options.threshold_d);
    result.recall = fraction_within(gt_to_query, options.threshold_d);
    result.fscore = harmonic_fscore(result.precision, result.recall);
    if (options.with_emd) {
        result.emd = emd_exact(gt, query, options.emd_cap);
    }
    return result;
}

} // namespace collimetric
