#include "cellfit/partitioner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "cellfit/errors.hpp"
#include "cellfit/objective.hpp"
#include "cellfit/parallel.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/splits.hpp"

namespace cellfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct WorkCell {
    Hypercube cube;
    RowIndex train_rows;
    RowIndex val_rows;
    CellFit fit;
    bool alive = true;
};

// Splits a row list on x[dim] < thr; both outputs stay in ascending order,
// which keeps downstream loss summation order (and hence bits) reproducible.
void split_rows(const Dataset& data, const RowIndex& rows, int dim, double thr, RowIndex* below,
                RowIndex* above) {
    below->clear();
    above->clear();
    for (int r : rows) {
        const double v = data.instances[static_cast<size_t>(r)].x[static_cast<size_t>(dim)];
        (v < thr ? below : above)->push_back(r);
    }
}

// One refinement proposal: a first cut, optionally followed by a second cut
// of one of its children (child 0 = below, 1 = above).
struct Candidate {
    int dim1 = 0;
    double thr1 = 0.0;
    int child = -1; // -1: two parts only
    int dim2 = 0;
    double thr2 = 0.0;
};

// Cached evaluation of a first cut: per-side row counts, admissibility
// against (s_min, v_min), and the best-in-pool validation loss of each
// admissible side (needed both for two-part proposals and as the sibling
// term of three-part ones).
struct FirstCutEval {
    std::array<int, 2> train_n{0, 0};
    std::array<int, 2> val_n{0, 0};
    std::array<bool, 2> ok{false, false};
    std::array<double, 2> loss{kInf, kInf};
};

} // namespace

std::vector<double> cut_candidates(const Dataset& data, std::span<const int> validation_rows,
                                   const Hypercube& cell, int dim, int max_cuts) {
    if (dim < 0 || dim >= cell.dimension())
        throw std::invalid_argument("cut dimension out of range");
    if (max_cuts < 1) throw std::invalid_argument("max_cuts must be >= 1");

    std::vector<double> values;
    for (int r : validation_rows) {
        const auto& x = data.instances[static_cast<size_t>(r)].x;
        if (cell.contains(x)) values.push_back(x[static_cast<size_t>(dim)]);
    }
    std::sort(values.begin(), values.end());

    std::vector<double> mids;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] == values[i - 1]) continue;
        const double mid = values[i - 1] + 0.5 * (values[i] - values[i - 1]);
        // adjacent representable doubles can collapse onto an endpoint
        if (mid > values[i - 1] && mid < values[i]) mids.push_back(mid);
    }
    const auto total = mids.size();
    if (static_cast<int>(total) <= max_cuts) return mids;

    // evenly spaced picks across the ordered midpoint list
    std::vector<double> thinned;
    thinned.reserve(static_cast<size_t>(max_cuts));
    if (max_cuts == 1) {
        thinned.push_back(mids[total / 2]);
        return thinned;
    }
    size_t prev = total; // sentinel
    for (int i = 0; i < max_cuts; ++i) {
        const size_t idx = static_cast<size_t>(i) * (total - 1) / static_cast<size_t>(max_cuts - 1);
        if (idx != prev) thinned.push_back(mids[idx]);
        prev = idx;
    }
    return thinned;
}

SearchResult opt_partition(const Dataset& data, std::span<const int> train_rows,
                           std::span<const int> validation_rows,
                           const std::vector<LearnerSpec>& pool, const FitConfig& config) {
    config.validate();
    data.validate();
    if (pool.empty()) throw TrainError("learner pool is empty");
    if (train_rows.empty()) throw TrainError("no training rows");
    if (validation_rows.empty()) throw TrainError("no validation rows");
    // pool.size() == config.M is *not* required here: config.M only prices
    // the complexity penalty, and callers may probe a pool subset while
    // keeping the penalty of the full pool. fit_model enforces equality.

    const int dim = data.dimension();
    const double alpha = config.resolved_alpha();
    const int n_val = static_cast<int>(validation_rows.size());
    // sqrt(k^2 log(M) / n) is linear in k, so the global penalty is
    // k * unit and a refinement into p parts adds exactly (p-1) * unit.
    const double unit =
        alpha * std::sqrt(std::log(static_cast<double>(config.M)) / static_cast<double>(n_val));

    std::vector<WorkCell> cells;
    {
        WorkCell root;
        root.cube = Hypercube::full_space(dim);
        root.train_rows.assign(train_rows.begin(), train_rows.end());
        root.val_rows.assign(validation_rows.begin(), validation_rows.end());
        std::sort(root.train_rows.begin(), root.train_rows.end());
        std::sort(root.val_rows.begin(), root.val_rows.end());
        root.fit = fit_cell(pool, data, root.train_rows, root.val_rows, config.loss,
                            derive_seed(config.seed, SeedStream::learner, 0));
        cells.push_back(std::move(root));
    }

    auto global_objective = [&] {
        double sum = 0.0;
        int k = 0;
        for (const auto& cell : cells)
            if (cell.alive) {
                sum += cell.fit.validation_loss_sum;
                ++k;
            }
        return sum / static_cast<double>(n_val) + static_cast<double>(k) * unit;
    };
    auto alive_count = [&] {
        int k = 0;
        for (const auto& cell : cells) k += cell.alive ? 1 : 0;
        return k;
    };

    // best validation loss sum achievable on a row subset, trying the whole pool
    auto best_loss = [&](const RowIndex& tr, const RowIndex& va, uint64_t seed) {
        return fit_cell(pool, data, tr, va, config.loss, seed).validation_loss_sum;
    };

    SearchResult result;
    std::deque<int> work;
    work.push_back(0);

    while (!work.empty()) {
        const int ci = work.front();
        work.pop_front();
        WorkCell& cell = cells[static_cast<size_t>(ci)];

        const int k_now = alive_count();
        int max_parts = config.gamma;
        if (config.max_leaves) max_parts = std::min(max_parts, *config.max_leaves - k_now + 1);

        RefineStep step;
        step.cell_index = ci;
        step.objective_before = global_objective();
        step.objective_after = step.objective_before;

        if (max_parts < 2) {
            result.trace.push_back(std::move(step));
            continue; // leaf cap reached; nothing to decide
        }

        // ---- stage 1: all single cuts ----
        std::vector<Candidate> singles;
        for (int d = 0; d < dim; ++d)
            for (double thr : cut_candidates(data, cell.val_rows, cell.cube, d,
                                             config.max_cuts_per_dim))
                singles.push_back({d, thr, -1, 0, 0.0});

        const uint64_t cand_base = derive_seed(config.seed, SeedStream::learner,
                                               0xC0DE0000ULL + static_cast<uint64_t>(ci));
        std::vector<FirstCutEval> firsts(singles.size());
        parallel_for(singles.size(), config.threads, [&](size_t i) {
            const Candidate& cand = singles[i];
            RowIndex tr_b, tr_a, va_b, va_a;
            split_rows(data, cell.train_rows, cand.dim1, cand.thr1, &tr_b, &tr_a);
            split_rows(data, cell.val_rows, cand.dim1, cand.thr1, &va_b, &va_a);
            FirstCutEval& ev = firsts[i];
            ev.train_n = {static_cast<int>(tr_b.size()), static_cast<int>(tr_a.size())};
            ev.val_n = {static_cast<int>(va_b.size()), static_cast<int>(va_a.size())};
            for (int s = 0; s < 2; ++s)
                ev.ok[static_cast<size_t>(s)] =
                    ev.train_n[static_cast<size_t>(s)] >= config.s_min &&
                    ev.val_n[static_cast<size_t>(s)] >= config.v_min;
            if (ev.ok[0]) ev.loss[0] = best_loss(tr_b, va_b, derive_seed(cand_base, SeedStream::learner, 2 * i));
            if (ev.ok[1]) ev.loss[1] = best_loss(tr_a, va_a, derive_seed(cand_base, SeedStream::learner, 2 * i + 1));
        });

        const double cell_loss = cell.fit.validation_loss_sum;
        double best_delta = kInf;
        int best_idx = -1; // index into singles, or singles.size()+j for doubles
        for (size_t i = 0; i < singles.size(); ++i) {
            const FirstCutEval& ev = firsts[i];
            if (!ev.ok[0] || !ev.ok[1]) continue;
            step.candidates += 1;
            const double delta = (ev.loss[0] + ev.loss[1] - cell_loss) / n_val + unit;
            if (delta < best_delta) {
                best_delta = delta;
                best_idx = static_cast<int>(i);
            }
        }

        // ---- stage 2: second cuts on one child (three parts) ----
        std::vector<Candidate> doubles;
        std::vector<double> double_sibling_loss;
        if (max_parts >= 3) {
            for (size_t i = 0; i < singles.size(); ++i) {
                const FirstCutEval& ev = firsts[i];
                for (int child = 0; child < 2; ++child) {
                    const int sibling = 1 - child;
                    if (!ev.ok[static_cast<size_t>(sibling)]) continue;
                    // the subdivided child needs no standalone admissibility:
                    // only its two parts must clear the minimums
                    auto [below, above] = cell.cube.split(singles[i].dim1, singles[i].thr1);
                    const Hypercube& ccube = child == 0 ? below : above;
                    for (int d2 = 0; d2 < dim; ++d2)
                        for (double thr2 : cut_candidates(data, cell.val_rows, ccube, d2,
                                                          config.max_cuts_per_dim)) {
                            Candidate cand = singles[i];
                            cand.child = child;
                            cand.dim2 = d2;
                            cand.thr2 = thr2;
                            doubles.push_back(cand);
                            double_sibling_loss.push_back(ev.loss[static_cast<size_t>(sibling)]);
                        }
                }
            }
            std::vector<double> deltas(doubles.size(), kInf);
            parallel_for(doubles.size(), config.threads, [&](size_t j) {
                const Candidate& cand = doubles[j];
                RowIndex tr_b, tr_a, va_b, va_a;
                split_rows(data, cell.train_rows, cand.dim1, cand.thr1, &tr_b, &tr_a);
                split_rows(data, cell.val_rows, cand.dim1, cand.thr1, &va_b, &va_a);
                const RowIndex& ctr = cand.child == 0 ? tr_b : tr_a;
                const RowIndex& cva = cand.child == 0 ? va_b : va_a;
                RowIndex gtr_b, gtr_a, gva_b, gva_a;
                split_rows(data, ctr, cand.dim2, cand.thr2, &gtr_b, &gtr_a);
                split_rows(data, cva, cand.dim2, cand.thr2, &gva_b, &gva_a);
                if (static_cast<int>(gtr_b.size()) < config.s_min ||
                    static_cast<int>(gtr_a.size()) < config.s_min ||
                    static_cast<int>(gva_b.size()) < config.v_min ||
                    static_cast<int>(gva_a.size()) < config.v_min)
                    return;
                const uint64_t s0 = derive_seed(cand_base, SeedStream::learner, 0x30000 + 2 * j);
                const uint64_t s1 = derive_seed(cand_base, SeedStream::learner, 0x30000 + 2 * j + 1);
                const double sum = double_sibling_loss[j] + best_loss(gtr_b, gva_b, s0) +
                                   best_loss(gtr_a, gva_a, s1);
                deltas[j] = (sum - cell_loss) / n_val + 2.0 * unit;
            });
            for (size_t j = 0; j < doubles.size(); ++j) {
                if (deltas[j] == kInf) continue; // a part fell below the size minimums
                step.candidates += 1;
                if (deltas[j] < best_delta) {
                    best_delta = deltas[j];
                    best_idx = static_cast<int>(singles.size() + j);
                }
            }
        }

        if (best_idx < 0 || best_delta >= -config.improvement_tol) {
            result.trace.push_back(std::move(step)); // keep as a leaf
            continue;
        }

        // ---- apply the winning refinement ----
        const bool is_double = best_idx >= static_cast<int>(singles.size());
        const Candidate& won =
            is_double ? doubles[static_cast<size_t>(best_idx) - singles.size()]
                      : singles[static_cast<size_t>(best_idx)];

        std::vector<Hypercube> child_cubes;
        std::vector<RowIndex> child_train, child_val;
        {
            auto [below, above] = cell.cube.split(won.dim1, won.thr1);
            RowIndex tr_b, tr_a, va_b, va_a;
            split_rows(data, cell.train_rows, won.dim1, won.thr1, &tr_b, &tr_a);
            split_rows(data, cell.val_rows, won.dim1, won.thr1, &va_b, &va_a);
            if (!is_double) {
                child_cubes = {below, above};
                child_train = {std::move(tr_b), std::move(tr_a)};
                child_val = {std::move(va_b), std::move(va_a)};
            } else {
                const Hypercube& ccube = won.child == 0 ? below : above;
                const Hypercube& sib = won.child == 0 ? above : below;
                auto [gb, ga] = ccube.split(won.dim2, won.thr2);
                RowIndex& ctr = won.child == 0 ? tr_b : tr_a;
                RowIndex& cva = won.child == 0 ? va_b : va_a;
                RowIndex gtr_b, gtr_a, gva_b, gva_a;
                split_rows(data, ctr, won.dim2, won.thr2, &gtr_b, &gtr_a);
                split_rows(data, cva, won.dim2, won.thr2, &gva_b, &gva_a);
                // sibling first keeps child order aligned with creation order
                child_cubes = {sib, gb, ga};
                child_train = {won.child == 0 ? std::move(tr_a) : std::move(tr_b),
                               std::move(gtr_b), std::move(gtr_a)};
                child_val = {won.child == 0 ? std::move(va_a) : std::move(va_b),
                             std::move(gva_b), std::move(gva_a)};
            }
        }

        cells[static_cast<size_t>(ci)].alive = false;
        step.split = true;
        step.children = child_cubes;
        for (size_t c = 0; c < child_cubes.size(); ++c) {
            WorkCell child;
            child.cube = child_cubes[c];
            child.train_rows = std::move(child_train[c]);
            child.val_rows = std::move(child_val[c]);
            const auto creation = static_cast<uint64_t>(cells.size());
            child.fit = fit_cell(pool, data, child.train_rows, child.val_rows, config.loss,
                                 derive_seed(config.seed, SeedStream::learner, creation));
            work.push_back(static_cast<int>(cells.size()));
            cells.push_back(std::move(child));
        }
        step.objective_after = global_objective();
        result.trace.push_back(std::move(step));
    }

    // ---- assemble the model from surviving leaves (creation order) ----
    PartitionModel& model = result.model;
    model.schema = data.schema;
    model.pool = pool;
    model.config = config;
    model.seed = config.seed;
    for (auto& cell : cells) {
        if (!cell.alive) continue;
        TrainedCell out;
        out.cell = std::move(cell.cube);
        out.pool_index = cell.fit.pool_index;
        out.predictor = std::move(cell.fit.predictor);
        out.train_count = static_cast<int>(cell.train_rows.size());
        out.validation_count = static_cast<int>(cell.val_rows.size());
        out.validation_loss_sum = cell.fit.validation_loss_sum;
        model.cells.push_back(std::move(out));
    }
    {
        std::vector<double> sums;
        sums.reserve(model.cells.size());
        for (const auto& cell : model.cells) sums.push_back(cell.validation_loss_sum);
        model.objective = penalized_objective(sums, static_cast<int>(model.cells.size()), n_val,
                                              config.M, alpha);
    }
    return result;
}

double partition_objective(const Partition& partition, const Dataset& data,
                           std::span<const int> train_rows, std::span<const int> validation_rows,
                           const std::vector<LearnerSpec>& pool, const FitConfig& config) {
    config.validate();
    if (partition.cells.empty()) throw std::invalid_argument("empty partition");
    if (!partition.pairwise_disjoint()) throw std::invalid_argument("partition cells overlap");

    const int n_val = static_cast<int>(validation_rows.size());
    std::vector<double> sums;
    sums.reserve(partition.cells.size());
    size_t covered_train = 0, covered_val = 0;
    for (size_t i = 0; i < partition.cells.size(); ++i) {
        const Hypercube& cube = partition.cells[i];
        RowIndex tr, va;
        for (int r : train_rows)
            if (cube.contains(data.instances[static_cast<size_t>(r)].x)) tr.push_back(r);
        for (int r : validation_rows)
            if (cube.contains(data.instances[static_cast<size_t>(r)].x)) va.push_back(r);
        covered_train += tr.size();
        covered_val += va.size();
        const CellFit fit = fit_cell(pool, data, tr, va, config.loss,
                                     derive_seed(config.seed, SeedStream::learner,
                                                 0xAAAA0000ULL + i));
        sums.push_back(fit.validation_loss_sum);
    }
    if (covered_train != train_rows.size() || covered_val != validation_rows.size())
        throw std::invalid_argument("partition does not cover every row");
    return penalized_objective(sums, partition.size(), n_val, config.M, config.resolved_alpha());
}

PartitionModel fit_model(const Dataset& data, const std::vector<LearnerSpec>& pool,
                         const FitConfig& config) {
    config.validate();
    if (static_cast<int>(pool.size()) != config.M)
        throw ConfigError("pool size " + std::to_string(pool.size()) +
                          " does not match config.M = " + std::to_string(config.M));
    if (data.role == DatasetRole::test || data.role == DatasetRole::validation)
        throw ConfigError("refusing to train on a dataset marked " + to_string(data.role));
    if (data.size() < config.s_min + config.v_min)
        throw TrainError("need at least s_min + v_min = " +
                         std::to_string(config.s_min + config.v_min) + " rows, got " +
                         std::to_string(data.size()));

    const SplitIndices split = stratified_split(data, config.validation_fraction,
                                                derive_seed(config.seed, SeedStream::split));
    return opt_partition(data, split.train, split.validation, pool, config).model;
}

PartitionModel fit_model(const Dataset& train, const Dataset& validation,
                         const std::vector<LearnerSpec>& pool, const FitConfig& config) {
    if (!(train.schema == validation.schema))
        throw ConfigError("train and validation schemas differ");
    Dataset merged;
    merged.schema = train.schema;
    merged.role = DatasetRole::unsplit;
    merged.instances = train.instances;
    merged.instances.insert(merged.instances.end(), validation.instances.begin(),
                            validation.instances.end());
    RowIndex tr(static_cast<size_t>(train.size()));
    std::iota(tr.begin(), tr.end(), 0);
    RowIndex va(static_cast<size_t>(validation.size()));
    std::iota(va.begin(), va.end(), train.size());
    if (static_cast<int>(pool.size()) != config.M)
        throw ConfigError("pool size " + std::to_string(pool.size()) +
                          " does not match config.M = " + std::to_string(config.M));
    return opt_partition(merged, tr, va, pool, config).model;
}

} // namespace cellfit
