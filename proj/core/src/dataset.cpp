#include "cellfit/dataset.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cellfit {

std::string to_string(DatasetRole role) {
    switch (role) {
        case DatasetRole::unsplit: return "unsplit";
        case DatasetRole::train: return "train";
        case DatasetRole::validation: return "validation";
        case DatasetRole::test: return "test";
    }
    return "unsplit";
}

DatasetRole dataset_role_from_string(const std::string& s) {
    if (s == "unsplit") return DatasetRole::unsplit;
    if (s == "train") return DatasetRole::train;
    if (s == "validation") return DatasetRole::validation;
    if (s == "test") return DatasetRole::test;
    throw std::invalid_argument("unknown dataset role: " + s);
}

void Dataset::validate() const {
    schema.validate();
    const int d = dimension();
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (static_cast<int>(inst.x.size()) != d)
            throw std::invalid_argument("instance " + std::to_string(i) + " has dimension " +
                                        std::to_string(inst.x.size()) + ", schema says " +
                                        std::to_string(d));
        if (inst.y != 0 && inst.y != 1)
            throw std::invalid_argument("instance " + std::to_string(i) + " label not in {0,1}");
        for (int j = 0; j < d; ++j) {
            const auto& f = schema.features[static_cast<size_t>(j)];
            const double v = inst.x[static_cast<size_t>(j)];
            if (std::isnan(v)) continue; // missing entries are legal pre-imputation
            if (f.kind == FeatureKind::categorical) {
                // categories.size() is the shared unseen/missing bucket
                const double max_code = static_cast<double>(f.categories.size());
                if (v != std::floor(v) || v < 0.0 || v > max_code)
                    throw std::invalid_argument("instance " + std::to_string(i) +
                                                " has invalid code for feature " + f.name);
            }
        }
    }
}

int Dataset::count_positive() const {
    return std::accumulate(instances.begin(), instances.end(), 0,
                           [](int acc, const LabeledInstance& inst) { return acc + inst.y; });
}

RowIndex all_rows(const Dataset& data) {
    RowIndex rows(static_cast<size_t>(data.size()));
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

} // namespace cellfit
