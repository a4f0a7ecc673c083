#pragma once

#include <cstddef>
#include <vector>

#include "collimetric/geometry.hpp"

namespace collimetric {

/// Exact nearest-neighbor index (kd-tree) over a non-empty cloud.
class NnIndex {
public:
    /// Throws ErrorKind::empty_cloud.
    explicit NnIndex(const PointCloud& cloud);

    /// Squared distance to the closest indexed point, identical to a linear
    /// scan using squared_distance().
    double nearest_squared_distance(Point3 q) const;
    double nearest_distance(Point3 q) const;

    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        // Leaves have axis == -1 and cover points_[begin, end).
        int axis = -1;
        double split = 0.0;
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t left = 0;
        std::size_t right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);

    std::vector<Point3> points_;
    std::vector<Node> nodes_;
};

NnIndex build_nn_index(const PointCloud& cloud);
double nearest_distance(const NnIndex& index, Point3 q);

/// A point expressed in a DirectionFrame: (a, b) = (p.u, p.v), depth t = p.d.
struct ProjectedPoint {
    double a = 0.0;
    double b = 0.0;
    double t = 0.0;
};

struct PlaneRect {
    double a_min = 0.0;
    double b_min = 0.0;
    double a_max = 0.0;
    double b_max = 0.0;
};

/// Uniform 2D bins over the projected (a, b) coordinates of a cloud.
/// Footprint membership is a closed box test.
class ProjectedIndex {
public:
    /// Throws ErrorKind::invalid_argument for cell_size <= 0. An empty cloud
    /// yields an index whose queries all return nothing.
    ProjectedIndex(const PointCloud& cloud, const DirectionFrame& frame, double cell_size);

    const DirectionFrame& frame() const { return frame_; }
    double cell_size() const { return cell_size_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }
    /// Projected extent; meaningless when empty().
    const PlaneRect& bounds() const { return bounds_; }

    /// Depths of points with |a - center_a| <= half_a and |b - center_b| <= half_b,
    /// sorted ascending. `out` is cleared first.
    void footprint_depths(double center_a, double center_b, double half_a, double half_b,
                          std::vector<double>& out) const;
    std::vector<double> footprint_depths(double center_a, double center_b, double half_a,
                                         double half_b) const;

    /// Projects one point exactly the way the index does.
    static ProjectedPoint project(const DirectionFrame& frame, Point3 p);

private:
    DirectionFrame frame_;
    double cell_size_;
    PlaneRect bounds_;
    std::size_t cols_ = 0;
    std::size_t rows_ = 0;
    std::vector<ProjectedPoint> points_;    // grouped by bin
    std::vector<std::size_t> bin_offsets_;  // rows_ * cols_ + 1 entries
};

ProjectedIndex build_projected_index(const PointCloud& cloud, const DirectionFrame& frame,
                                     double cell_size);

} // namespace collimetric
