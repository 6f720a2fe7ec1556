#pragma once
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cellfit/config.hpp"
#include "cellfit/dataset.hpp"
#include "cellfit/hypercube.hpp"
#include "cellfit/model.hpp"

namespace cellfit {

// One greedy decision over a worklist cell: either the cell was kept as a
// leaf or it was replaced by the recorded child cells.
struct RefineStep {
    int cell_index = 0; // creation index of the examined cell
    bool split = false;
    int candidates = 0;              // admissible refinements scored for this cell
    std::vector<Hypercube> children; // empty when the cell was kept
    double objective_before = 0.0;   // global penalized objective, validation split
    double objective_after = 0.0;    // equals objective_before for a keep
};

struct SearchResult {
    PartitionModel model;
    std::vector<RefineStep> trace;
};

// Candidate thresholds for cutting `cell` along `dim`: midpoints between
// adjacent distinct validation values inside the cell, thinned to at most
// max_cuts evenly spaced quantiles. Every returned threshold lies strictly
// inside the cell's interval.
std::vector<double> cut_candidates(const Dataset& data, std::span<const int> validation_rows,
                                   const Hypercube& cell, int dim, int max_cuts);

// Greedy partition search. Starts from the full space, repeatedly takes the
// oldest unresolved cell, exhaustively scores every admissible refinement
// into at most config.gamma parts (guillotine cuts drawn from
// cut_candidates), and splits when the best one lowers the penalized
// objective by more than config.improvement_tol. A part is admissible when
// it keeps >= s_min training and >= v_min validation rows. After the
// partition is frozen, the learner of every final cell is re-selected.
SearchResult opt_partition(const Dataset& data, std::span<const int> train_rows,
                           std::span<const int> validation_rows,
                           const std::vector<LearnerSpec>& pool, const FitConfig& config);

// End-to-end training: carves a validation split out of `data` using
// config.validation_fraction and the seed, runs opt_partition, and stamps
// the result with schema/config/seed. The pool size must equal config.M.
PartitionModel fit_model(const Dataset& data, const std::vector<LearnerSpec>& pool,
                         const FitConfig& config);

// Pre-split variant; both datasets must share a schema.
PartitionModel fit_model(const Dataset& train, const Dataset& validation,
                         const std::vector<LearnerSpec>& pool, const FitConfig& config);

// Penalized objective of an arbitrary candidate partition of the same data:
// mean validation loss of per-cell best learners plus the complexity
// penalty. Exposed so search results can be checked against brute force.
double partition_objective(const Partition& partition, const Dataset& data,
                           std::span<const int> train_rows, std::span<const int> validation_rows,
                           const std::vector<LearnerSpec>& pool, const FitConfig& config);

} // namespace cellfit
