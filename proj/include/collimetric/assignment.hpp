#pragma once

#include <cstddef>
#include <vector>

namespace collimetric {

/// Dense square cost matrix, row-major.
class CostMatrix {
public:
    explicit CostMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t row, std::size_t col) { return values_[row * n_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

struct Assignment {
    /// column assigned to each row
    std::vector<std::size_t> row_to_col;
    double total_cost = 0.0;
};

/// Minimum-cost perfect matching (Hungarian method with potentials, O(n^3)).
/// total_cost is summed over rows in index order.
Assignment solve_assignment(const CostMatrix& cost);

} // namespace collimetric
