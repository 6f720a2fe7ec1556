#include "cellfit/splits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cellfit/cfs.hpp"
#include "cellfit/errors.hpp"
#include "cellfit/rng.hpp"

namespace cellfit {

SplitIndices random_split(int n, double validation_fraction, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("need at least two rows to split");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("validation_fraction must lie in (0,1)");

    auto n_val = static_cast<int>(std::lround(static_cast<double>(n) * validation_fraction));
    n_val = std::clamp(n_val, 1, n - 1); // both sides stay populated

    RowIndex order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    SplitIndices split;
    split.validation.assign(order.begin(), order.begin() + n_val);
    split.train.assign(order.begin() + n_val, order.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

SplitIndices stratified_split(const Dataset& data, double validation_fraction,
                              std::uint64_t seed) {
    if (data.size() < 2) throw std::invalid_argument("need at least two rows to split");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("validation_fraction must lie in (0,1)");

    std::array<RowIndex, 2> byclass;
    for (int r = 0; r < data.size(); ++r)
        byclass[static_cast<size_t>(data.instances[static_cast<size_t>(r)].y)].push_back(r);

    Rng rng(seed);
    SplitIndices split;
    for (auto& rows : byclass) {
        rng.shuffle(rows);
        const auto n_val = static_cast<size_t>(
            std::lround(static_cast<double>(rows.size()) * validation_fraction));
        split.validation.insert(split.validation.end(), rows.begin(),
                                rows.begin() + static_cast<std::ptrdiff_t>(n_val));
        split.train.insert(split.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_val),
                           rows.end());
    }
    // per-class rounding can empty one side on tiny inputs; rebalance so both
    // splits stay usable
    while (split.train.empty()) {
        split.train.push_back(split.validation.back());
        split.validation.pop_back();
    }
    while (split.validation.empty()) {
        split.validation.push_back(split.train.back());
        split.train.pop_back();
    }
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

ThreeWaySplit temporal_split(const Dataset& data, int time_feature, double train_fraction,
                             double validation_fraction) {
    if (time_feature < 0 || time_feature >= data.dimension())
        throw std::invalid_argument("time feature index out of range");
    if (!(train_fraction > 0.0 && validation_fraction > 0.0 &&
          train_fraction + validation_fraction < 1.0))
        throw std::invalid_argument("fractions must be positive and sum below 1");

    RowIndex order = all_rows(data);
    // stable sort keeps row order among equal timestamps; NaNs sort last
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ta = data.instances[static_cast<size_t>(a)].x[static_cast<size_t>(time_feature)];
        const double tb = data.instances[static_cast<size_t>(b)].x[static_cast<size_t>(time_feature)];
        if (std::isnan(ta)) return false;
        if (std::isnan(tb)) return true;
        return ta < tb;
    });

    const auto n = static_cast<double>(data.size());
    const auto n_train = static_cast<size_t>(std::lround(n * train_fraction));
    const auto n_val = static_cast<size_t>(std::lround(n * validation_fraction));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= order.size())
        throw std::invalid_argument("fractions leave an empty slice");

    ThreeWaySplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                            order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    return split;
}

std::pair<Dataset, Dataset> temporal_split(const Dataset& data, int time_feature, double cutoff) {
    if (time_feature < 0 || time_feature >= data.dimension())
        throw std::invalid_argument("time feature index out of range");

    RowIndex before, after;
    for (int r = 0; r < data.size(); ++r) {
        const double t = data.instances[static_cast<size_t>(r)].x[static_cast<size_t>(time_feature)];
        if (std::isnan(t))
            throw TrainError("time feature is missing in row " + std::to_string(r));
        (t < cutoff ? before : after).push_back(r);
    }
    if (before.empty()) throw TrainError("temporal split leaves an empty training side");
    if (after.empty()) throw TrainError("temporal split leaves an empty test side");

    RowIndex keep;
    for (int f = 0; f < data.dimension(); ++f)
        if (f != time_feature) keep.push_back(f);
    const Dataset reduced = project_features(data, keep);
    return {subset(reduced, before, DatasetRole::train), subset(reduced, after, DatasetRole::test)};
}

Dataset subset(const Dataset& data, const RowIndex& rows, DatasetRole role) {
    Dataset out;
    out.schema = data.schema;
    out.role = role;
    out.instances.reserve(rows.size());
    for (int r : rows) {
        if (r < 0 || r >= data.size()) throw std::invalid_argument("subset row out of range");
        out.instances.push_back(data.instances[static_cast<size_t>(r)]);
    }
    return out;
}

} // namespace cellfit
