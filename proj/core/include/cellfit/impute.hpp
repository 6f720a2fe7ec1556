#pragma once
#include <vector>

#include "cellfit/dataset.hpp"

namespace cellfit {

bool has_missing(const Dataset& data);

// Per-feature fill values over observed entries: mean for numeric features,
// most frequent code for categorical ones (ties -> lowest code). Throws
// TrainError if some feature has no observed value at all.
std::vector<double> impute_fill_values(const Dataset& data);

// Replaces every missing entry with its column fill value.
void mean_impute(Dataset& data);

// Nearest-neighbour imputation. Row distance is the root mean squared
// difference of standardized values over features observed in both rows;
// rows sharing nothing are incomparable. Each gap is filled from the k
// nearest rows observed in that feature (mean for numeric, modal code for
// categorical, ties -> lowest code), falling back to the column fill value
// when no comparable donor exists. All fills are computed from the original
// matrix before any are applied.
void knn_impute(Dataset& data, int k = 10);

} // namespace cellfit
