#pragma once
#include <string>
#include <vector>

#include "cellfit/dataset.hpp"

namespace testutil {

inline cellfit::FeatureSchema numeric_schema(int dims) {
    cellfit::FeatureSchema schema;
    for (int j = 0; j < dims; ++j) {
        cellfit::FeatureSpec f;
        f.name = "x" + std::to_string(j + 1);
        schema.features.push_back(std::move(f));
    }
    return schema;
}

inline cellfit::Dataset make_dataset(const std::vector<std::vector<double>>& xs,
                                     const std::vector<int>& ys) {
    cellfit::Dataset data;
    data.schema = numeric_schema(xs.empty() ? 1 : static_cast<int>(xs.front().size()));
    for (size_t i = 0; i < xs.size(); ++i)
        data.instances.push_back({xs[i], ys[i]});
    return data;
}

inline cellfit::Dataset make_dataset_1d(const std::vector<double>& xs,
                                        const std::vector<int>& ys) {
    std::vector<std::vector<double>> rows;
    rows.reserve(xs.size());
    for (double v : xs) rows.push_back({v});
    return make_dataset(rows, ys);
}

} // namespace testutil
