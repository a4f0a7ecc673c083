#include "collimetric/assignment.hpp"

#include <limits>

namespace collimetric {

// Shortest augmenting path with row/column potentials; 1-based internally,
// column 0 is the virtual start of each augmentation.
Assignment solve_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.size();
    Assignment result;
    result.row_to_col.assign(n, 0);
    if (n == 0) {
        return result;
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> row_pot(n + 1, 0.0);
    std::vector<double> col_pot(n + 1, 0.0);
    std::vector<std::size_t> col_owner(n + 1, 0);  // row matched to each column
    std::vector<std::size_t> way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t row0 = col_owner[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) {
                    continue;
                }
                const double slack = cost(row0 - 1, col - 1) - row_pot[row0] - col_pot[col];
                if (slack < min_slack[col]) {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if (min_slack[col] < delta) {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    row_pot[col_owner[col]] += delta;
                    col_pot[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
        } while (col_owner[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            col_owner[col0] = col_owner[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    for (std::size_t col = 1; col <= n; ++col) {
        result.row_to_col[col_owner[col] - 1] = col - 1;
    }
    for (std::size_t row = 0; row < n; ++row) {
        result.total_cost += cost(row, result.row_to_col[row]);
    }
    return result;
}

} // namespace collimetric
