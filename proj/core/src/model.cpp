#include "cellfit/model.hpp"

#include <stdexcept>
#include <string>

#include "cellfit/errors.hpp"
#include "cellfit/rng.hpp"

namespace cellfit {

Partition PartitionModel::partition() const {
    Partition part;
    part.cells.reserve(cells.size());
    for (const auto& cell : cells) part.cells.push_back(cell.cell);
    return part;
}

int PartitionModel::locate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("point dimension does not match model schema");
    for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i].cell.contains(x)) return static_cast<int>(i);
    throw std::out_of_range("no cell contains the query point");
}

double PartitionModel::predict_proba(std::span<const double> x) const {
    const auto idx = static_cast<size_t>(locate(x));
    return cells[idx].predictor.predict_proba(x);
}

void PartitionModel::validate() const {
    schema.validate();
    config.validate();
    if (cells.empty()) throw std::invalid_argument("model has no cells");
    if (static_cast<int>(pool.size()) != config.M)
        throw std::invalid_argument("pool size disagrees with config.M");
    for (const auto& cell : cells) {
        cell.cell.validate();
        if (cell.cell.dimension() != dimension())
            throw std::invalid_argument("cell dimension disagrees with schema");
        if (cell.pool_index < 0 || cell.pool_index >= static_cast<int>(pool.size()))
            throw std::invalid_argument("cell refers to a learner outside the pool");
    }
    if (!partition().pairwise_disjoint())
        throw std::invalid_argument("model cells overlap");
}

CellFit fit_cell(const std::vector<LearnerSpec>& pool, const Dataset& data,
                 std::span<const int> train_rows, std::span<const int> validation_rows,
                 LossKind loss, uint64_t seed) {
    if (pool.empty()) throw TrainError("learner pool is empty");
    CellFit best;
    double best_loss = 0.0;
    bool have_best = false;
    for (size_t m = 0; m < pool.size(); ++m) {
        TrainedPredictor candidate =
            fit(pool[m], data, train_rows, derive_seed(seed, SeedStream::learner, m));
        const auto [sum, count] = eval_loss(candidate, data, validation_rows, loss);
        // strict improvement only: ties resolve to the lowest pool index
        if (!have_best || sum < best_loss) {
            have_best = true;
            best_loss = sum;
            best.pool_index = static_cast<int>(m);
            best.predictor = std::move(candidate);
            best.validation_loss_sum = sum;
            best.validation_count = count;
        }
    }
    return best;
}

} // namespace cellfit
