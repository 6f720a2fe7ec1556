#pragma once
#include <cstdint>
#include <utility>

#include "cellfit/dataset.hpp"

namespace cellfit {

struct SplitIndices {
    RowIndex train;
    RowIndex validation;
};

// Uniform shuffle split; validation gets round(n * validation_fraction)
// rows, clamped so both sides stay nonempty when 0 < fraction < 1 and
// n >= 2. Both index lists come back sorted ascending.
SplitIndices random_split(int n, double validation_fraction, std::uint64_t seed);

// Label-stratified variant used by model training: each class is shuffled
// and sliced separately so the validation split preserves the positive rate
// to within one instance per class. Same clamping and ordering guarantees.
SplitIndices stratified_split(const Dataset& data, double validation_fraction,
                              std::uint64_t seed);

struct ThreeWaySplit {
    RowIndex train;
    RowIndex validation;
    RowIndex test;
};

// Orders rows by a feature (stable; NaNs last) and slices chronologically:
// earliest block trains, middle validates, latest tests.
ThreeWaySplit temporal_split(const Dataset& data, int time_feature, double train_fraction,
                             double validation_fraction);

// Cutoff form: rows with time < cutoff train, rows with time >= cutoff test,
// and the time feature itself is dropped from both output schemas (models
// must not condition on it). Throws TrainError when either side is empty or
// the time value is missing in any row.
std::pair<Dataset, Dataset> temporal_split(const Dataset& data, int time_feature, double cutoff);

Dataset subset(const Dataset& data, const RowIndex& rows, DatasetRole role);

} // namespace cellfit
