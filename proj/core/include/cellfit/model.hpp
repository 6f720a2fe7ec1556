#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cellfit/config.hpp"
#include "cellfit/dataset.hpp"
#include "cellfit/hypercube.hpp"
#include "cellfit/learners.hpp"

namespace cellfit {

// One partition cell with the learner chosen for it. pool_index points into
// PartitionModel::pool; the predictor was fitted on the training rows that
// fall inside `cell`.
struct TrainedCell {
    Hypercube cell;
    int pool_index = 0;
    TrainedPredictor predictor;
    int train_count = 0;
    int validation_count = 0;
    double validation_loss_sum = 0.0;

    bool operator==(const TrainedCell&) const = default;
};

struct PartitionModel {
    FeatureSchema schema;
    std::vector<LearnerSpec> pool;
    std::vector<TrainedCell> cells;
    FitConfig config;
    uint64_t seed = 0;
    // final penalized objective on the validation split
    double objective = 0.0;

    int dimension() const { return schema.dimension(); }
    std::size_t size() const { return cells.size(); }

    Partition partition() const;

    // index of the unique cell containing x; throws std::invalid_argument on
    // dimension mismatch and std::out_of_range if no cell contains x (cannot
    // happen for models built by fit_model, whose cells tile the full space)
    int locate(std::span<const double> x) const;

    double predict_proba(std::span<const double> x) const;
    int predict_class(std::span<const double> x) const { return predicted_class(predict_proba(x)); }

    // cells must be pairwise disjoint, nonempty, and dimension-consistent
    void validate() const;
};

// Selects the penalized-loss-minimizing learner for each row subset.
// Returns the pool index (lowest index wins ties) plus the fitted predictor.
struct CellFit {
    int pool_index = 0;
    TrainedPredictor predictor;
    double validation_loss_sum = 0.0;
    int validation_count = 0;
};

CellFit fit_cell(const std::vector<LearnerSpec>& pool, const Dataset& data,
                 std::span<const int> train_rows, std::span<const int> validation_rows,
                 LossKind loss, uint64_t seed);

} // namespace cellfit
