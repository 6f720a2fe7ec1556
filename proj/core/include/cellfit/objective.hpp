#pragma once
#include <span>

namespace cellfit {

// Penalized validation objective for a k-cell model:
//
//   (sum of per-cell loss sums) / n  +  alpha * sqrt(k^2 * log(M) / n)
//
// Per-cell losses are unnormalized sums so the global 1/n weighting is
// applied exactly once here. Logarithms are natural throughout; switching the
// base only rescales alpha (see kPenaltyLogBase).
double penalized_objective(std::span<const double> cell_loss_sums, int k, int n, int M,
                           double alpha);

// Smallest penalty weight for which the true expected loss of a k-cell model
// stays below the penalized objective with probability at least 1 - delta:
//
//   sqrt(1/2 + log(2 / (1 - (1-delta)^(1/k))) / (2 log M))
//
// Non-increasing in delta, non-decreasing in k. Whether k should be a local
// subproblem cell count or the global leaf count is the caller's choice.
double min_alpha(double delta, int k, int M);

// Natural log is used in the penalty and the alpha bound. Kept as a named
// constant so the choice is visible and switchable in one place.
inline constexpr double kPenaltyLogBase = 2.718281828459045235360287471353;

} // namespace cellfit
