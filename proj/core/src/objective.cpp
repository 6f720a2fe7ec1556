#include "cellfit/objective.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cellfit {

double penalized_objective(std::span<const double> cell_loss_sums, int k, int n, int M,
                           double alpha) {
    if (k < 1) throw std::invalid_argument("cell count k must be >= 1");
    if (n < 1) throw std::invalid_argument("sample count n must be >= 1");
    if (M < 2) throw std::invalid_argument("pool size M must be >= 2");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    const double loss_sum = std::accumulate(cell_loss_sums.begin(), cell_loss_sums.end(), 0.0);
    const double kk = static_cast<double>(k);
    const double penalty = alpha * std::sqrt(kk * kk * std::log(static_cast<double>(M)) /
                                             static_cast<double>(n));
    return loss_sum / static_cast<double>(n) + penalty;
}

double min_alpha(double delta, int k, int M) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0,1]");
    if (k < 1) throw std::invalid_argument("cell count k must be >= 1");
    if (M < 2) throw std::invalid_argument("pool size M must be >= 2");
    // Failure probability is budgeted evenly over k cells:
    // per-cell budget 1 - (1-delta)^(1/k), then a Hoeffding-style inversion.
    const double per_cell = 1.0 - std::pow(1.0 - delta, 1.0 / static_cast<double>(k));
    const double log_m = std::log(static_cast<double>(M));
    return std::sqrt(0.5 + std::log(2.0 / per_cell) / (2.0 * log_m));
}

} // namespace cellfit
