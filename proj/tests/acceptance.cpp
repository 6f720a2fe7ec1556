// End-to-end acceptance gate. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero when any criterion fails. Tolerances and time
// budgets are pinned here, next to the checks they gate.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cellfit/evalbench.hpp"
#include "cellfit/impute.hpp"
#include "cellfit/matching.hpp"
#include "cellfit/model_io.hpp"
#include "cellfit/objective.hpp"
#include "cellfit/partitioner.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/synth.hpp"

using namespace cellfit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<LearnerSpec> constant_pair() {
    return {LearnerSpec::make(LearnerId::constant), LearnerSpec::make(LearnerId::constant)};
}

FeatureSchema grid_schema(int dims) {
    FeatureSchema schema;
    for (int d = 0; d < dims; ++d) {
        FeatureSpec f;
        f.name = "x" + std::to_string(d + 1);
        schema.features.push_back(f);
    }
    return schema;
}

// ---------------------------------------------------------------------------
// 1. The greedy two-leaf search must equal exhaustive enumeration over
//    {no cut} + every admissible single cut, across many seeded datasets.
// ---------------------------------------------------------------------------
Outcome criterion_1() {
    constexpr double kTol = 1e-12;
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant)};
    const double alphas[] = {0.0, 0.05, 0.2, 1.0};

    double worst_gap = 0.0;
    int checked = 0;
    for (uint64_t s = 1; s <= 50; ++s) {
        Rng rng(s);
        const int n = 24 + static_cast<int>(s % 17); // 24..40
        const int dims = 1 + static_cast<int>(s % 2);

        Dataset data;
        data.schema = grid_schema(dims);
        for (int i = 0; i < n; ++i) {
            LabeledInstance inst;
            for (int d = 0; d < dims; ++d) inst.x.push_back(rng.uniform(-1, 1));
            inst.y = rng.bernoulli(inst.x[0] > 0 ? 0.75 : 0.3) ? 1 : 0;
            data.instances.push_back(std::move(inst));
        }
        RowIndex train, validation;
        for (int i = 0; i < n; ++i) (i % 2 == 0 ? train : validation).push_back(i);

        FitConfig config;
        config.gamma = 2;
        config.alpha = alphas[s % 4];
        config.loss = (s % 2 == 0) ? LossKind::zero_one : LossKind::brier;
        config.M = 2;
        config.s_min = 3;
        config.v_min = 3;
        config.max_leaves = 2;
        config.improvement_tol = 0.0;

        const auto result = opt_partition(data, train, validation, pool, config);

        // exhaustive scan over the same admissible refinement set
        const auto full = Hypercube::full_space(dims);
        const Partition whole{{full}};
        double best = partition_objective(whole, data, train, validation, pool, config);
        for (int d = 0; d < dims; ++d) {
            for (double t :
                 cut_candidates(data, validation, full, d, config.max_cuts_per_dim)) {
                const auto [lo, hi] = full.split(d, t);
                int s_lo = 0, v_lo = 0;
                for (int r : train) s_lo += lo.contains(data.instances[r].x) ? 1 : 0;
                for (int r : validation) v_lo += lo.contains(data.instances[r].x) ? 1 : 0;
                const int s_hi = static_cast<int>(train.size()) - s_lo;
                const int v_hi = static_cast<int>(validation.size()) - v_lo;
                if (s_lo < config.s_min || s_hi < config.s_min) continue;
                if (v_lo < config.v_min || v_hi < config.v_min) continue;
                const Partition cand{{lo, hi}};
                best = std::min(best,
                                partition_objective(cand, data, train, validation, pool, config));
            }
        }

        worst_gap = std::max(worst_gap, std::abs(result.model.objective - best));
        ++checked;
        if (worst_gap > kTol)
            return {false, "seed " + std::to_string(s) + ": |search - exhaustive| = " +
                               fmt(worst_gap) + " > 1e-12"};
    }
    return {true, std::to_string(checked) + " seeded datasets, worst gap " + fmt(worst_gap)};
}

// ---------------------------------------------------------------------------
// 2. With alpha = min_alpha(0.1, 4, 2) the penalized objective upper-bounds
//    the generator-exact expected loss in at least 85% of 200 fresh redraws.
// ---------------------------------------------------------------------------
Outcome criterion_2() {
    constexpr int kDraws = 200;
    constexpr int kMaxViolations = 30; // 0.15 * 200
    const auto spec = SynthSpec::three_segments();

    FitConfig config;
    config.alpha = min_alpha(0.1, 4, 2);
    config.loss = LossKind::zero_one;
    config.M = 2;
    config.s_min = 30;
    config.v_min = 15;
    config.max_leaves = 4;

    int violations = 0;
    for (int draw = 0; draw < kDraws; ++draw) {
        const Dataset data = sample(spec, 1500, 5000 + static_cast<uint64_t>(draw));
        config.seed = 9000 + static_cast<uint64_t>(draw);
        const auto model = fit_model(data, constant_pair(), config);
        const double true_loss = true_expected_loss(spec, model, LossKind::zero_one);
        if (true_loss >= model.objective) ++violations;
    }
    const double rate = static_cast<double>(violations) / kDraws;
    return {violations <= kMaxViolations,
            std::to_string(violations) + "/" + std::to_string(kDraws) +
                " bound violations (rate " + fmt(rate) + ", allowed 0.15)"};
}

// ---------------------------------------------------------------------------
// 3. On the four-quadrant generator the search recovers exactly four cells
//    with cuts at the axes, beats 5% held-out error, while the best single
//    pool learner cannot get below 25%.
// ---------------------------------------------------------------------------
Outcome criterion_3() {
    constexpr uint64_t kTrainSeed = 9;
    constexpr uint64_t kTestSeed = 10;
    constexpr uint64_t kFitSeed = 13;
    constexpr double kCutSlack = 0.05;
    constexpr double kErrorCap = 0.05;
    constexpr double kSingleLearnerFloor = 0.25;

    const auto spec = SynthSpec::xor_quadrants();
    const Dataset train = sample(spec, 4000, kTrainSeed);
    const Dataset test = sample(spec, 2000, kTestSeed);

    FitConfig config;
    config.gamma = 3;
    config.alpha = 1.0;
    config.loss = LossKind::zero_one;
    config.M = 2;
    config.seed = kFitSeed;
    const auto model = fit_model(train, constant_pair(), config);

    if (model.cells.size() != 4)
        return {false, "expected 4 cells, got " + std::to_string(model.cells.size())};

    double worst_cut = 0.0;
    for (const auto& cell : model.cells)
        for (const auto& iv : cell.cell.bounds) {
            if (std::isfinite(iv.lo)) worst_cut = std::max(worst_cut, std::abs(iv.lo));
            if (std::isfinite(iv.hi)) worst_cut = std::max(worst_cut, std::abs(iv.hi));
        }
    if (worst_cut > kCutSlack)
        return {false, "cut threshold " + fmt(worst_cut) + " strays past +/-0.05"};

    const double test_error = evaluate_model(model, test).zero_one;
    if (test_error > kErrorCap)
        return {false, "held-out error " + fmt(test_error) + " > 0.05"};

    // every pool learner, trained unpartitioned on all rows, must stay bad
    double best_single = 1.0;
    const RowIndex everything = all_rows(train);
    for (const auto& learner_spec : constant_pair()) {
        const auto predictor = fit(learner_spec, train, everything, config.seed);
        const auto [loss_sum, count] = eval_loss(predictor, test, all_rows(test),
                                                 LossKind::zero_one);
        best_single = std::min(best_single, loss_sum / count);
    }
    if (best_single < kSingleLearnerFloor)
        return {false, "a single pool learner reached error " + fmt(best_single)};

    return {true, "4 cells, cuts within " + fmt(worst_cut) + ", error " + fmt(test_error) +
                      ", best single learner " + fmt(best_single)};
}

// ---------------------------------------------------------------------------
// 4. Sweeping the leaf cap over {1,2,4,8,16,32} on a small sample must peak
//    strictly inside the range: underfit at 1, overfit at 32.
// ---------------------------------------------------------------------------
Outcome criterion_4() {
    constexpr uint64_t kTrainSeed = 113;
    constexpr uint64_t kTestSeed = 201;
    constexpr uint64_t kFitSeed = 1;

    const auto spec = SynthSpec::checkerboard();
    const Dataset train = sample(spec, 600, kTrainSeed); // small n: overfitting bites early
    const Dataset test = sample(spec, 4000, kTestSeed);

    FitConfig config;
    config.alpha = 0.0; // no penalty: the leaf cap alone controls complexity
    config.loss = LossKind::log_loss;
    config.M = 2;
    config.s_min = 4; // permissive floors so the search can genuinely overfit
    config.v_min = 2;
    config.improvement_tol = 0.0;
    config.seed = kFitSeed;

    const std::vector<int> caps = {1, 2, 4, 8, 16, 32};
    std::vector<double> accuracy;
    for (int cap : caps) {
        FitConfig capped = config;
        capped.max_leaves = cap;
        const auto model = fit_model(train, constant_pair(), capped);
        accuracy.push_back(evaluate_model(model, test).accuracy);
    }
    const auto it = std::max_element(accuracy.begin(), accuracy.end());
    const auto arg = static_cast<size_t>(it - accuracy.begin());

    std::string curve;
    for (size_t i = 0; i < accuracy.size(); ++i)
        curve += (i ? " " : "") + std::to_string(caps[i]) + ":" + fmt(accuracy[i]);

    if (arg == 0 || arg + 1 == accuracy.size())
        return {false, "accuracy peaks at the boundary cap " + std::to_string(caps[arg]) +
                           " (" + curve + ")"};
    if (!(accuracy[arg] > accuracy.front() && accuracy[arg] > accuracy.back()))
        return {false, "interior peak does not strictly beat both ends (" + curve + ")"};
    return {true, "peak at cap " + std::to_string(caps[arg]) + " (" + curve + ")"};
}

// ---------------------------------------------------------------------------
// 5. The benchmark table has the canonical shape: four confidence levels,
//    six method rows, per-row counts non-increasing in the level, and the
//    partition model holding the top confident count at 0.95.
// ---------------------------------------------------------------------------
Outcome criterion_5() {
    const auto spec = SynthSpec::checkerboard();
    const Dataset train = sample(spec, 4000, 21);
    const Dataset test = sample(spec, 2000, 22);

    FitConfig config;
    config.alpha = 0.3;
    config.loss = LossKind::log_loss;
    config.seed = 3;
    config.gamma = 2;
    config.s_min = 50;
    config.v_min = 25;
    config.threads = 4;
    config.M = 5;

    const auto report = run_benchmark(train, test, default_pool(), default_baselines(), config,
                                      default_confidence_levels());

    if (report.levels.size() != 4)
        return {false, "expected 4 confidence levels, got " +
                           std::to_string(report.levels.size())};
    if (report.rows.size() != 6)
        return {false, "expected 6 table rows, got " + std::to_string(report.rows.size())};
    if (report.rows[0].method != "cellfit")
        return {false, "first row should be the partition model, got '" +
                           report.rows[0].method + "'"};

    for (const auto& row : report.rows) {
        if (!row.error.empty())
            return {false, "method " + row.method + " failed to train: " + row.error};
        if (row.confidence.size() != 4)
            return {false, "method " + row.method + " has " +
                               std::to_string(row.confidence.size()) +
                               " confidence entries, expected 4"};
        for (size_t i = 1; i < row.confidence.size(); ++i)
            if (row.confidence[i].selected > row.confidence[i - 1].selected)
                return {false, "method " + row.method +
                                   ": confident count grows with the threshold"};
    }

    const int model_count = report.rows[0].confidence[3].selected; // level 0.95
    int best_baseline = 0;
    std::string at = "-";
    for (size_t r = 1; r < report.rows.size(); ++r)
        if (report.rows[r].confidence[3].selected > best_baseline) {
            best_baseline = report.rows[r].confidence[3].selected;
            at = report.rows[r].method;
        }
    if (model_count < best_baseline)
        return {false, "partition 0.95-count " + std::to_string(model_count) +
                           " trails baseline " + at + " at " + std::to_string(best_baseline)};
    return {true, "6x4 table, monotone counts, 0.95-count " + std::to_string(model_count) +
                      " vs best baseline " + std::to_string(best_baseline) + " (" + at + ")"};
}

// ---------------------------------------------------------------------------
// 6. Penalty-weight spot values.
// ---------------------------------------------------------------------------
Outcome criterion_6() {
    for (int k : {1, 2, 5, 7}) {
        const double a = min_alpha(1.0, k, 2);
        if (std::abs(a - 1.0) > 1e-12)
            return {false, "min_alpha(1, " + std::to_string(k) + ", 2) = " + fmt(a) +
                               ", expected exactly 1"};
    }
    const double a = min_alpha(0.05, 1, 2);
    if (std::abs(a - 1.7779) > 1e-3)
        return {false, "min_alpha(0.05, 1, 2) = " + fmt(a) + ", expected 1.7779 +/- 1e-3"};
    return {true, "delta=1 collapses to 1.0 exactly; min_alpha(0.05,1,2) = " + fmt(a)};
}

// ---------------------------------------------------------------------------
// 7. Deferred acceptance never leaves a blocking pair, verified by a literal
//    scan independent of the library's own stability check.
// ---------------------------------------------------------------------------
Outcome criterion_7() {
    auto blocking_pair_exists = [](const std::vector<std::vector<double>>& scores,
                                   const std::vector<int>& capacity, const MatchResult& result) {
        const size_t nr = scores.size();
        const size_t nd = capacity.size();
        for (size_t r = 0; r < nr; ++r) {
            for (size_t d = 0; d < nd; ++d) {
                if (result.donor_of[r] == static_cast<int>(d)) continue;
                bool r_wants = false;
                if (result.donor_of[r] < 0) {
                    r_wants = true;
                } else {
                    const auto cur = static_cast<size_t>(result.donor_of[r]);
                    r_wants = scores[r][d] != scores[r][cur] ? scores[r][d] > scores[r][cur]
                                                             : d < cur;
                }
                if (!r_wants) continue;
                const auto& held = result.matched[d];
                if (held.size() < static_cast<size_t>(capacity[d])) return true;
                for (int h : held) {
                    const auto a = static_cast<size_t>(h);
                    const bool d_wants = scores[r][d] != scores[a][d]
                                             ? scores[r][d] > scores[a][d]
                                             : r < a;
                    if (d_wants) return true;
                }
            }
        }
        return false;
    };

    int instances = 0;
    for (uint64_t seed : {11u, 22u, 33u}) {
        for (int nr = 1; nr <= 7; ++nr) {
            for (int nd = 1; nd <= 7; ++nd) {
                Rng rng(seed * 10000 + static_cast<uint64_t>(nr * 100 + nd));
                std::vector<std::vector<double>> scores(static_cast<size_t>(nr));
                for (auto& row : scores) {
                    row.resize(static_cast<size_t>(nd));
                    for (auto& v : row) v = rng.uniform01();
                }
                std::vector<int> capacity(static_cast<size_t>(nd));
                for (int d = 0; d < nd; ++d) capacity[static_cast<size_t>(d)] =
                    (d % 2 == 0) ? 1 : 1 + (d % 3);

                const auto result = stable_match(scores, capacity);
                if (blocking_pair_exists(scores, capacity, result))
                    return {false, "blocking pair at seed " + std::to_string(seed) + ", " +
                                       std::to_string(nr) + "x" + std::to_string(nd)};
                ++instances;
            }
        }
    }
    return {true, std::to_string(instances) + " matrices up to 7x7, no blocking pair"};
}

// ---------------------------------------------------------------------------
// 8. On correlated data, neighbour-based imputation recovers masked entries
//    strictly better than column means do.
// ---------------------------------------------------------------------------
Outcome criterion_8() {
    Dataset data = correlated_panel(400, 6, 0.85, 1234);
    const Dataset truth = data;

    Rng rng(4321);
    std::vector<std::pair<int, int>> masked;
    for (int i = 0; i < data.size(); ++i)
        for (int f = 0; f < data.dimension(); ++f)
            if (rng.bernoulli(0.15)) {
                data.instances[static_cast<size_t>(i)].x[static_cast<size_t>(f)] =
                    std::numeric_limits<double>::quiet_NaN();
                masked.emplace_back(i, f);
            }

    auto rmse = [&](const Dataset& filled) {
        double sq = 0.0;
        for (auto [i, f] : masked) {
            const double diff = filled.instances[static_cast<size_t>(i)].x[static_cast<size_t>(f)] -
                                truth.instances[static_cast<size_t>(i)].x[static_cast<size_t>(f)];
            sq += diff * diff;
        }
        return std::sqrt(sq / static_cast<double>(masked.size()));
    };

    Dataset by_mean = data;
    mean_impute(by_mean);
    Dataset by_knn = data;
    knn_impute(by_knn, 10);

    const double knn_rmse = rmse(by_knn);
    const double mean_rmse = rmse(by_mean);
    return {knn_rmse < mean_rmse, "masked " + std::to_string(masked.size()) +
                                      " entries: knn rmse " + fmt(knn_rmse) + " vs mean rmse " +
                                      fmt(mean_rmse)};
}

// ---------------------------------------------------------------------------
// 9. Same seeds, same bytes: refits and reports are byte-identical, and a
//    disk round trip preserves every prediction bit-exactly.
// ---------------------------------------------------------------------------
Outcome criterion_9() {
    const auto spec = SynthSpec::checkerboard();
    const Dataset train = sample(spec, 1200, 51);
    const Dataset test = sample(spec, 800, 52);

    FitConfig config;
    config.alpha = 0.1;
    config.loss = LossKind::zero_one;
    config.M = 2;
    config.s_min = 30;
    config.v_min = 15;
    config.seed = 7;
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant),
                                           LearnerSpec::make(LearnerId::tree)};

    const auto m1 = fit_model(train, pool, config);
    const auto m2 = fit_model(train, pool, config);
    if (model_to_json(m1) != model_to_json(m2))
        return {false, "two identically seeded fits serialized differently"};

    const std::vector<LearnerSpec> baselines = {LearnerSpec::make(LearnerId::logistic),
                                                LearnerSpec::make(LearnerId::tree)};
    const auto r1 =
        run_benchmark(train, test, pool, baselines, config, default_confidence_levels());
    const auto r2 =
        run_benchmark(train, test, pool, baselines, config, default_confidence_levels());
    if (report_to_json(r1) != report_to_json(r2))
        return {false, "two identically seeded benchmark reports differ as JSON"};
    if (report_to_text(r1) != report_to_text(r2))
        return {false, "two identically seeded benchmark reports differ as text"};

    const auto path = std::filesystem::temp_directory_path() / "cellfit_acceptance_model.json";
    save_model(m1, path.string());
    const auto loaded = load_model(path.string());
    std::filesystem::remove(path);

    Rng rng(53);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const double before = m1.predict_proba(x);
        const double after = loaded.predict_proba(x);
        if (before != after) // bitwise, no tolerance
            return {false, "round-tripped prediction differs at input " + std::to_string(i)};
    }
    return {true, "byte-identical refits and reports; 1000 round-tripped predictions bit-exact"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds; // 0 = no explicit budget
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "greedy search equals exhaustive enumeration", criterion_1, 10.0},
        {2, "penalized objective bounds the true loss", criterion_2, 300.0},
        {3, "planted quadrant structure is recovered", criterion_3, 60.0},
        {4, "leaf-cap sweep peaks strictly inside the range", criterion_4, 300.0},
        {5, "benchmark table shape and confident-count dominance", criterion_5, 0.0},
        {6, "penalty-weight spot values", criterion_6, 0.0},
        {7, "matchings admit no blocking pair", criterion_7, 10.0},
        {8, "neighbour imputation beats column means", criterion_8, 0.0},
        {9, "determinism and bit-exact persistence", criterion_9, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0 && elapsed > c.budget_seconds) {
            outcome.pass = false;
            outcome.detail += " [exceeded " + fmt(c.budget_seconds) + "s budget]";
        }
        std::printf("[%s] %d %s (%.1fs): %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                    elapsed, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures > 0) std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
