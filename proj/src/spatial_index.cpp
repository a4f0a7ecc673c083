#include "collimetric/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "collimetric/error.hpp"

namespace collimetric {

namespace {

constexpr std::size_t leaf_size = 8;

} // namespace

// ---------------------------------------------------------------- NnIndex

NnIndex::NnIndex(const PointCloud& cloud) : points_(cloud.points) {
    if (points_.empty()) {
        throw Error(ErrorKind::empty_cloud, "nearest-neighbor index: cloud is empty");
    }
    nodes_.reserve(2 * points_.size() / leaf_size + 1);
    build(0, points_.size());
}

std::size_t NnIndex::build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({});
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= leaf_size) {
        return id;
    }
    Point3 lo = points_[begin];
    Point3 hi = points_[begin];
    for (std::size_t k = begin; k < end; ++k) {
        const Point3& p = points_[k];
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const Vec3 spread = hi - lo;
    int axis = 0;
    if (spread.y > spread[axis]) axis = 1;
    if (spread.z > spread[axis]) axis = 2;
    if (spread[axis] == 0.0) {
        return id;  // all points coincide
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                     points_.begin() + static_cast<std::ptrdiff_t>(mid),
                     points_.begin() + static_cast<std::ptrdiff_t>(end),
                     [axis](const Point3& a, const Point3& b) { return a[axis] < b[axis]; });
    const double split = points_[mid][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& node = nodes_[id];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

double NnIndex::nearest_squared_distance(Point3 q) const {
    double best = std::numeric_limits<double>::infinity();
    // Explicit stack of (node, lower bound on squared distance).
    std::pair<std::size_t, double> stack[128];
    std::size_t top = 0;
    stack[top++] = {0, 0.0};
    while (top > 0) {
        const auto [id, bound] = stack[--top];
        if (bound > best) {
            continue;
        }
        const Node& node = nodes_[id];
        if (node.axis < 0) {
            for (std::size_t k = node.begin; k < node.end; ++k) {
                best = std::min(best, squared_distance(q, points_[k]));
            }
            continue;
        }
        // Left holds coordinates <= split, right >= split.
        const double diff = q[node.axis] - node.split;
        const std::size_t near = diff < 0.0 ? node.left : node.right;
        const std::size_t far = diff < 0.0 ? node.right : node.left;
        stack[top++] = {far, diff * diff};
        stack[top++] = {near, bound};
    }
    return best;
}

double NnIndex::nearest_distance(Point3 q) const {
    return std::sqrt(nearest_squared_distance(q));
}

NnIndex build_nn_index(const PointCloud& cloud) { return NnIndex(cloud); }

double nearest_distance(const NnIndex& index, Point3 q) { return index.nearest_distance(q); }

// ---------------------------------------------------------------- ProjectedIndex

ProjectedPoint ProjectedIndex::project(const DirectionFrame& frame, Point3 p) {
    return {dot(p, frame.u), dot(p, frame.v), dot(p, frame.d)};
}

ProjectedIndex::ProjectedIndex(const PointCloud& cloud, const DirectionFrame& frame,
                               double cell_size)
    : frame_(frame), cell_size_(cell_size) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw Error(ErrorKind::invalid_argument, "projected index: cell size must be positive");
    }
    if (cloud.empty()) {
        bin_offsets_.assign(1, 0);
        return;
    }
    std::vector<ProjectedPoint> projected;
    projected.reserve(cloud.size());
    bounds_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point3& p : cloud.points) {
        const ProjectedPoint q = project(frame, p);
        bounds_.a_min = std::min(bounds_.a_min, q.a);
        bounds_.b_min = std::min(bounds_.b_min, q.b);
        bounds_.a_max = std::max(bounds_.a_max, q.a);
        bounds_.b_max = std::max(bounds_.b_max, q.b);
        projected.push_back(q);
    }

    // Keep the bin table proportional to the point count for sparse, wide clouds.
    const std::size_t max_bins = 4 * projected.size() + 1024;
    const auto bins_along = [](double extent, double cell) {
        return static_cast<std::size_t>(std::floor(extent / cell)) + 1;
    };
    while (static_cast<double>(bins_along(bounds_.a_max - bounds_.a_min, cell_size_)) *
               static_cast<double>(bins_along(bounds_.b_max - bounds_.b_min, cell_size_)) >
           static_cast<double>(max_bins)) {
        cell_size_ *= 2.0;
    }
    cols_ = bins_along(bounds_.a_max - bounds_.a_min, cell_size_);
    rows_ = bins_along(bounds_.b_max - bounds_.b_min, cell_size_);

    const auto bin_of = [&](const ProjectedPoint& q) {
        const auto ia = std::min(cols_ - 1, static_cast<std::size_t>(
                                                std::floor((q.a - bounds_.a_min) / cell_size_)));
        const auto ib = std::min(rows_ - 1, static_cast<std::size_t>(
                                                std::floor((q.b - bounds_.b_min) / cell_size_)));
        return ib * cols_ + ia;
    };

    // Counting sort into bins; points keep their input order inside a bin.
    bin_offsets_.assign(cols_ * rows_ + 1, 0);
    std::vector<std::size_t> bin_ids(projected.size());
    for (std::size_t k = 0; k < projected.size(); ++k) {
        bin_ids[k] = bin_of(projected[k]);
        ++bin_offsets_[bin_ids[k] + 1];
    }
    std::partial_sum(bin_offsets_.begin(), bin_offsets_.end(), bin_offsets_.begin());
    points_.resize(projected.size());
    std::vector<std::size_t> cursor(bin_offsets_.begin(), bin_offsets_.end() - 1);
    for (std::size_t k = 0; k < projected.size(); ++k) {
        points_[cursor[bin_ids[k]]++] = projected[k];
    }
}

void ProjectedIndex::footprint_depths(double center_a, double center_b, double half_a,
                                      double half_b, std::vector<double>& out) const {
    out.clear();
    if (points_.empty()) {
        return;
    }
    // Bin range with one bin of slack on each side against rounding; the
    // closed-box test below is the actual membership rule.
    const auto bin_range = [this](double lo, double hi, double origin, std::size_t count,
                                  std::size_t& first, std::size_t& last) {
        const double f = std::floor((lo - origin) / cell_size_) - 1.0;
        const double l = std::floor((hi - origin) / cell_size_) + 1.0;
        if (l < 0.0 || f > static_cast<double>(count - 1)) {
            return false;
        }
        first = f < 0.0 ? 0 : static_cast<std::size_t>(f);
        last = std::min(count - 1, static_cast<std::size_t>(l));
        return true;
    };
    std::size_t a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    if (!bin_range(center_a - half_a, center_a + half_a, bounds_.a_min, cols_, a0, a1) ||
        !bin_range(center_b - half_b, center_b + half_b, bounds_.b_min, rows_, b0, b1)) {
        return;
    }
    for (std::size_t ib = b0; ib <= b1; ++ib) {
        const std::size_t row = ib * cols_;
        for (std::size_t k = bin_offsets_[row + a0]; k < bin_offsets_[row + a1 + 1]; ++k) {
            const ProjectedPoint& p = points_[k];
            if (std::abs(p.a - center_a) <= half_a && std::abs(p.b - center_b) <= half_b) {
                out.push_back(p.t);
            }
        }
    }
    std::sort(out.begin(), out.end());
}

std::vector<double> ProjectedIndex::footprint_depths(double center_a, double center_b,
                                                     double half_a, double half_b) const {
    std::vector<double> out;
    footprint_depths(center_a, center_b, half_a, half_b, out);
    return out;
}

ProjectedIndex build_projected_index(const PointCloud& cloud, const DirectionFrame& frame,
                                     double cell_size) {
    return ProjectedIndex(cloud, frame, cell_size);
}

} // namespace collimetric
