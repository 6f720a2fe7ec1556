#pragma once
#include <cstdint>
#include <optional>
#include <string>

#include "cellfit/loss.hpp"

namespace cellfit {

// Every knob of the partition search. `alpha` may be given directly or
// derived from a coverage target (delta, k_assumed) through min_alpha().
struct FitConfig {
    int gamma = 2;                    // max cells produced by one subproblem call (2 or 3)
    double alpha = 1.0;               // penalty weight, >= 0
    std::optional<double> delta;      // in (0,1); when set, alpha := min_alpha(delta, k_assumed, M)
    int k_assumed = 1;                // leaf count plugged into the alpha bound
    LossKind loss = LossKind::zero_one;
    int M = 2;                        // learner pool size; the penalty uses log M
    int s_min = 50;                   // min training instances per cell
    int v_min = 25;                   // min validation instances per cell
    double validation_fraction = 0.25;
    uint64_t seed = 0;
    std::optional<int> max_leaves;    // global leaf cap; unset = unbounded
    int max_cuts_per_dim = 32;        // candidate-threshold cap per axis
    double improvement_tol = 1e-9;    // a split must beat the incumbent by more than this
    int threads = 1;

    // throws ConfigError when any bound is violated (notably M < 2: the
    // log M penalty degenerates for a single-learner pool)
    void validate() const;

    // alpha after resolving the optional delta route
    double resolved_alpha() const;
};

} // namespace cellfit
