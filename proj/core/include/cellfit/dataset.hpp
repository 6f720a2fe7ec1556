#pragma once
#include <span>
#include <vector>

#include "cellfit/schema.hpp"

namespace cellfit {

// Encoded feature vector with a binary outcome label.
struct LabeledInstance {
    std::vector<double> x;
    int y = 0; // {0, 1}
};

enum class DatasetRole { unsplit, train, validation, test };

std::string to_string(DatasetRole role);
DatasetRole dataset_role_from_string(const std::string& s);

struct Dataset {
    FeatureSchema schema;
    std::vector<LabeledInstance> instances;
    DatasetRole role = DatasetRole::unsplit;

    int dimension() const { return schema.dimension(); }
    int size() const { return static_cast<int>(instances.size()); }
    bool empty() const { return instances.empty(); }

    // checks every instance against the schema (dimension, label in {0,1},
    // categorical codes in range); throws std::invalid_argument
    void validate() const;

    int count_positive() const;
};

// Row identifiers used to address subsets of a dataset without copying.
using RowIndex = std::vector<int>;

RowIndex all_rows(const Dataset& data);

} // namespace cellfit
