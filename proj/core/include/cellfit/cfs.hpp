#pragma once
#include <span>
#include <vector>

#include "cellfit/dataset.hpp"

namespace cellfit {

// Pearson correlation over pairs where both entries are non-NaN; 0 when
// either side is constant or fewer than two pairs remain.
double pearson(std::span<const double> x, std::span<const double> y);

// Correlation-based merit of a feature subset:
//   k * mean|corr(feature, label)| / sqrt(k + k(k-1) * mean|corr(fi, fj)|)
// Higher is better: relevant features raise the numerator, redundant ones
// inflate the denominator.
double cfs_merit(const Dataset& data, std::span<const int> rows, std::span<const int> features);

struct CfsResult {
    std::vector<int> selected;     // best subset found, in selection order
    std::vector<int> path;         // full forward-selection order
    std::vector<double> merits;    // merit after each expansion along `path`
    double best_merit = 0.0;
};

// Greedy forward selection on cfs_merit, stopping after `stall` consecutive
// expansions without a new best. Ties choose the lowest feature index.
CfsResult cfs_select(const Dataset& data, std::span<const int> rows, int stall = 5);

// Drops all features outside `keep` (selection order preserved as given).
Dataset project_features(const Dataset& data, std::span<const int> keep);

} // namespace cellfit
