#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "cellfit/errors.hpp"
#include "cellfit/objective.hpp"
#include "cellfit/partitioner.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/splits.hpp"
#include "cellfit/synth.hpp"
#include "test_util.hpp"

using namespace cellfit;
using testutil::make_dataset;
using testutil::make_dataset_1d;

namespace {

std::vector<LearnerSpec> constant_pool() {
    return {LearnerSpec::make(LearnerId::constant), LearnerSpec::make(LearnerId::constant)};
}

// deterministic 1-D step: y = 1{x >= 50} over the grid 0..n-1
Dataset step_grid(int n) {
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < n; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(i >= 50 ? 1 : 0);
    }
    return make_dataset_1d(xs, ys);
}

void even_odd_split(int n, RowIndex& train, RowIndex& validation) {
    train.clear();
    validation.clear();
    for (int i = 0; i < n; ++i) (i % 2 == 0 ? train : validation).push_back(i);
}

} // namespace

TEST_CASE("cut candidates are midpoints of adjacent distinct values") {
    const Dataset data = make_dataset_1d({1, 2, 3, 4, 5}, {0, 0, 1, 1, 1});
    const RowIndex rows = {0, 1, 2, 3, 4};
    const auto cell = Hypercube::full_space(1);
    const auto cuts = cut_candidates(data, rows, cell, 0, 32);
    REQUIRE(cuts == std::vector<double>{1.5, 2.5, 3.5, 4.5});
}

TEST_CASE("duplicate values collapse before midpoints are formed") {
    const Dataset data = make_dataset_1d({1, 1, 2, 2}, {0, 0, 1, 1});
    const RowIndex rows = {0, 1, 2, 3};
    const auto cuts = cut_candidates(data, rows, Hypercube::full_space(1), 0, 32);
    REQUIRE(cuts == std::vector<double>{1.5});
}

TEST_CASE("a cell with at most one distinct value offers no cuts") {
    const Dataset data = make_dataset_1d({3, 3, 3}, {0, 1, 0});
    const RowIndex rows = {0, 1, 2};
    CHECK(cut_candidates(data, rows, Hypercube::full_space(1), 0, 32).empty());
    const RowIndex none;
    CHECK(cut_candidates(data, none, Hypercube::full_space(1), 0, 32).empty());
}

TEST_CASE("only values inside the cell produce candidates") {
    const Dataset data = make_dataset_1d({0, 2, 3, 4, 9}, {0, 0, 1, 1, 1});
    const RowIndex rows = {0, 1, 2, 3, 4};
    auto cell = Hypercube::full_space(1);
    cell.bounds[0].lo = 2.0;
    cell.bounds[0].hi = 4.5; // rows with x in {2, 3, 4}
    const auto cuts = cut_candidates(data, rows, cell, 0, 32);
    REQUIRE(cuts == std::vector<double>{2.5, 3.5});
    for (double t : cuts) {
        CHECK(t > cell.bounds[0].lo);
        CHECK(t < cell.bounds[0].hi);
    }
}

TEST_CASE("candidate lists are thinned to the requested cap") {
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 101; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(i % 2);
    }
    const Dataset data = make_dataset_1d(xs, ys);
    RowIndex rows(101);
    std::iota(rows.begin(), rows.end(), 0);
    const auto full = cut_candidates(data, rows, Hypercube::full_space(1), 0, 1000);
    REQUIRE(full.size() == 100);

    const auto thin = cut_candidates(data, rows, Hypercube::full_space(1), 0, 5);
    REQUIRE(thin.size() == 5);
    for (double t : thin) // thinning selects from the full midpoint list
        CHECK(std::find(full.begin(), full.end(), t) != full.end());
    CHECK(std::is_sorted(thin.begin(), thin.end()));
}

TEST_CASE("greedy search recovers a clean one-dimensional step") {
    const Dataset data = step_grid(100);
    RowIndex train, validation;
    even_odd_split(100, train, validation);

    FitConfig config;
    config.alpha = 0.0;
    config.s_min = 10;
    config.v_min = 5;
    config.M = 2;
    const auto result = opt_partition(data, train, validation, constant_pool(), config);

    REQUIRE(result.model.cells.size() == 2);
    CHECK(result.model.objective == 0.0); // perfectly separable, zero penalty

    // the boundary must sit between the last 0-label and first 1-label value
    double t = std::numeric_limits<double>::quiet_NaN();
    for (const auto& cell : result.model.cells) {
        const auto& iv = cell.cell.bounds[0];
        if (std::isfinite(iv.hi)) t = iv.hi;
    }
    CHECK(t > 48.0);
    CHECK(t < 52.0);

    // both leaves predict near-pure rates on their side
    CHECK(result.model.predict_proba(std::vector<double>{10.0}) < 0.1);
    CHECK(result.model.predict_proba(std::vector<double>{90.0}) > 0.9);
}

TEST_CASE("a large enough penalty suppresses every split") {
    const Dataset data = step_grid(100);
    RowIndex train, validation;
    even_odd_split(100, train, validation);

    FitConfig config;
    config.alpha = 1e6;
    config.s_min = 10;
    config.v_min = 5;
    const auto result = opt_partition(data, train, validation, constant_pool(), config);

    REQUIRE(result.model.cells.size() == 1);
    for (const auto& step : result.trace) {
        CHECK_FALSE(step.split);
        CHECK(step.children.empty());
        CHECK(step.objective_after == step.objective_before);
    }

    // the reported objective is mean loss plus the exact penalty term
    const auto& cell = result.model.cells[0];
    const double mean_loss = cell.validation_loss_sum / cell.validation_count;
    const std::vector<double> sums = {cell.validation_loss_sum};
    const double expected =
        penalized_objective(sums, 1, static_cast<int>(validation.size()), 2, 1e6);
    CHECK(result.model.objective == doctest::Approx(expected).epsilon(1e-15));
    CHECK(result.model.objective > mean_loss);
}

TEST_CASE("leaf caps clamp the search") {
    const Dataset data = step_grid(100);
    RowIndex train, validation;
    even_odd_split(100, train, validation);

    FitConfig config;
    config.alpha = 0.0;
    config.s_min = 4;
    config.v_min = 2;

    config.max_leaves = 1;
    auto result = opt_partition(data, train, validation, constant_pool(), config);
    CHECK(result.model.cells.size() == 1);

    config.max_leaves = 2;
    result = opt_partition(data, train, validation, constant_pool(), config);
    CHECK(result.model.cells.size() <= 2);
}

TEST_CASE("three-way refinement carves a band in one step") {
    // y = 1 exactly on the middle third; a single binary cut cannot be pure,
    // a ternary one can
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 150; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(i >= 50 && i < 100 ? 1 : 0);
    }
    const Dataset data = make_dataset_1d(xs, ys);
    RowIndex train, validation;
    even_odd_split(150, train, validation);

    FitConfig config;
    config.gamma = 3;
    config.alpha = 0.0;
    config.s_min = 10;
    config.v_min = 5;
    const auto result = opt_partition(data, train, validation, constant_pool(), config);

    REQUIRE(result.model.cells.size() == 3);
    CHECK(result.model.objective == 0.0);
    bool saw_ternary = false;
    for (const auto& step : result.trace)
        if (step.split && step.children.size() == 3) saw_ternary = true;
    CHECK(saw_ternary);
}

TEST_CASE("trace steps chain and improve monotonically") {
    Rng rng(19);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 400; ++i) {
        xs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const bool pos = (xs.back()[0] > 0) == (xs.back()[1] > 0);
        ys.push_back(rng.bernoulli(pos ? 0.9 : 0.1) ? 1 : 0);
    }
    const Dataset data = make_dataset(xs, ys);
    RowIndex train, validation;
    even_odd_split(400, train, validation);

    FitConfig config;
    config.alpha = 0.05;
    config.s_min = 12;
    config.v_min = 6;
    const auto result = opt_partition(data, train, validation, constant_pool(), config);

    REQUIRE_FALSE(result.trace.empty());
    for (size_t i = 0; i < result.trace.size(); ++i) {
        const auto& step = result.trace[i];
        if (step.split) {
            CHECK(step.objective_after < step.objective_before - config.improvement_tol);
            CHECK(step.children.size() >= 2);
            CHECK(step.children.size() <= static_cast<size_t>(config.gamma));
            CHECK(step.candidates > 0);
        } else {
            CHECK(step.children.empty());
            CHECK(step.objective_after == step.objective_before);
        }
        if (i + 1 < result.trace.size())
            CHECK(result.trace[i + 1].objective_before == step.objective_after);
    }
    CHECK(result.model.objective ==
          doctest::Approx(result.trace.back().objective_after).epsilon(1e-12));

    // the final partition tiles the full space
    result.model.validate();
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK_NOTHROW((void)result.model.locate(x));
    }
}

TEST_CASE("greedy binary search matches brute force on small problems") {
    // with a two-leaf cap the greedy pass *is* an exhaustive scan over
    // {no cut} + every admissible single cut, so the optima must agree
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant)};
    for (uint64_t seed = 100; seed < 110; ++seed) {
        Rng rng(seed);
        const int n = 30 + static_cast<int>(seed % 7);
        const int dims = 1 + static_cast<int>(seed % 2);
        std::vector<std::vector<double>> xs;
        std::vector<int> ys;
        for (int i = 0; i < n; ++i) {
            std::vector<double> x;
            for (int d = 0; d < dims; ++d) x.push_back(rng.uniform(-1, 1));
            xs.push_back(x);
            ys.push_back(rng.bernoulli(x[0] > 0 ? 0.8 : 0.25) ? 1 : 0);
        }
        const Dataset data = make_dataset(xs, ys);
        RowIndex train, validation;
        even_odd_split(n, train, validation);

        FitConfig config;
        config.alpha = (seed % 2 == 0) ? 0.1 : 0.0;
        config.s_min = 3;
        config.v_min = 2;
        config.max_leaves = 2;
        const auto result = opt_partition(data, train, validation, pool, config);

        const auto full = Hypercube::full_space(dims);
        double best = partition_objective(Partition{{full}}, data, train, validation, pool, config);
        for (int d = 0; d < dims; ++d) {
            for (double t : cut_candidates(data, validation, full, d, config.max_cuts_per_dim)) {
                const auto [lo, hi] = full.split(d, t);
                const Partition cand{{lo, hi}};
                int s_lo = 0, v_lo = 0;
                for (int r : train) s_lo += lo.contains(data.instances[r].x) ? 1 : 0;
                for (int r : validation) v_lo += lo.contains(data.instances[r].x) ? 1 : 0;
                const int s_hi = static_cast<int>(train.size()) - s_lo;
                const int v_hi = static_cast<int>(validation.size()) - v_lo;
                if (s_lo < config.s_min || s_hi < config.s_min) continue;
                if (v_lo < config.v_min || v_hi < config.v_min) continue;
                best = std::min(best,
                                partition_objective(cand, data, train, validation, pool, config));
            }
        }
        CHECK(std::abs(result.model.objective - best) <= 1e-12);
    }
}

TEST_CASE("candidate partitions must cover the data") {
    const Dataset data = make_dataset_1d({0, 1, 2, 3}, {0, 0, 1, 1});
    const RowIndex train = {0, 2};
    const RowIndex validation = {1, 3};
    auto cell = Hypercube::full_space(1);
    cell.bounds[0].hi = 2.5; // leaves x=3 uncovered
    FitConfig config;
    config.s_min = 1;
    config.v_min = 1;
    CHECK_THROWS_AS((void)partition_objective(Partition{{cell}}, data, train, validation,
                                              constant_pool(), config),
                    std::invalid_argument);
}

TEST_CASE("single-cell objective is reproducible by hand") {
    const Dataset data = make_dataset_1d({0, 1, 2, 3, 4, 5}, {1, 1, 1, 0, 1, 0});
    const RowIndex train = {0, 1, 2, 3};      // three positives -> p = 4/6
    const RowIndex validation = {4, 5};       // labels 1, 0
    FitConfig config;
    config.alpha = 0.3;
    config.s_min = 1;
    config.v_min = 1;
    config.M = 2;
    const Partition whole{{Hypercube::full_space(1)}};
    const double got = partition_objective(whole, data, train, validation, constant_pool(), config);
    // predicted class 1 everywhere: validation zero-one sum = 1 of 2, and the
    // penalty adds alpha * sqrt(1 * ln 2 / 2)
    const double expected = 0.5 + 0.3 * std::sqrt(std::log(2.0) / 2.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("cell fitting reports the winner and its validation loss") {
    const Dataset data = make_dataset_1d({0, 1, 2, 3, 4}, {1, 1, 1, 0, 1});
    const RowIndex train = {0, 1, 2};    // all positive
    const RowIndex validation = {3, 4};  // labels 0, 1
    const auto fit = fit_cell(constant_pool(), data, train, validation, LossKind::zero_one, 7);
    CHECK(fit.pool_index == 0); // identical losses resolve to the lowest index
    CHECK(fit.validation_count == 2);
    CHECK(fit.validation_loss_sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("training preconditions are enforced") {
    const Dataset data = step_grid(100);

    FitConfig config;
    config.s_min = 10;
    config.v_min = 5;

    SUBCASE("empty pool") {
        CHECK_THROWS_AS((void)fit_model(data, {}, config), ConfigError);
    }
    SUBCASE("pool size must match M") {
        config.M = 3;
        CHECK_THROWS_AS((void)fit_model(data, constant_pool(), config), ConfigError);
    }
    SUBCASE("too few rows for the configured minima") {
        const Dataset tiny = make_dataset_1d({1, 2, 3}, {0, 1, 0});
        CHECK_THROWS_WITH_AS((void)fit_model(tiny, constant_pool(), config),
                             doctest::Contains("s_min + v_min"), TrainError);
    }
    SUBCASE("missing values are refused") {
        Dataset holed = data;
        holed.instances[3].x[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS((void)fit_model(holed, constant_pool(), config), TrainError);
    }
    SUBCASE("invalid config surfaces before training") {
        config.gamma = 4;
        CHECK_THROWS_AS((void)fit_model(data, constant_pool(), config), ConfigError);
    }
}

TEST_CASE("pre-split training requires matching schemas") {
    const Dataset train = step_grid(100);
    Rng rng(3);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 60; ++i) {
        xs.push_back({rng.uniform(0, 100), rng.uniform(0, 1)});
        ys.push_back(0);
    }
    const Dataset other = make_dataset(xs, ys); // 2-D: different schema
    FitConfig config;
    config.s_min = 10;
    config.v_min = 5;
    CHECK_THROWS_AS((void)fit_model(train, other, constant_pool(), config), ConfigError);
}

TEST_CASE("end-to-end training on a segmented generator") {
    const auto spec = SynthSpec::three_segments();
    const Dataset data = sample(spec, 2000, 41);

    FitConfig config;
    config.alpha = 0.05;
    config.s_min = 30;
    config.v_min = 15;
    config.seed = 9;
    const auto model = fit_model(data, constant_pool(), config);

    model.validate();
    CHECK(model.cells.size() >= 2);
    CHECK(model.seed == 9);
    CHECK(model.schema.dimension() == 1);
    CHECK(model.pool.size() == 2);

    // the fitted rates track the generator's segment rates
    const Dataset test = sample(spec, 2000, 42);
    int correct = 0;
    for (const auto& inst : test.instances)
        correct += model.predict_class(inst.x) == inst.y ? 1 : 0;
    CHECK(static_cast<double>(correct) / test.size() > 0.8);

    // deterministic refit: identical seeds give identical models
    const auto again = fit_model(data, constant_pool(), config);
    CHECK(again.cells == model.cells);
    CHECK(again.objective == model.objective);

    // the pre-split overload with the same internal split reproduces it too
    const auto idx = stratified_split(data, config.validation_fraction,
                                      derive_seed(config.seed, SeedStream::split));
    const auto presplit = fit_model(subset(data, idx.train, DatasetRole::train),
                                    subset(data, idx.validation, DatasetRole::validation),
                                    constant_pool(), config);
    CHECK(presplit.cells.size() == model.cells.size());
    CHECK(presplit.objective == doctest::Approx(model.objective).epsilon(1e-12));
}

TEST_CASE("learner reselection prefers richer models where they help") {
    // inside each half the signal is linear in x2, so the per-cell winner
    // should beat an all-constant pool on held-out accuracy
    Rng rng(77);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 1200; ++i) {
        const double x1 = rng.uniform(-1, 1);
        const double x2 = rng.uniform(-1, 1);
        const double logit = (x1 > 0 ? 4.0 : -4.0) * x2;
        const double p = 1.0 / (1.0 + std::exp(-logit));
        xs.push_back({x1, x2});
        ys.push_back(rng.bernoulli(p) ? 1 : 0);
    }
    const Dataset data = make_dataset(xs, ys);

    FitConfig config;
    config.alpha = 0.1;
    config.s_min = 40;
    config.v_min = 20;
    config.seed = 13;
    std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant),
                                     LearnerSpec::make(LearnerId::logistic)};
    const auto model = fit_model(data, pool, config);
    bool chose_logistic = false;
    for (const auto& cell : model.cells)
        if (cell.pool_index == 1) chose_logistic = true;
    CHECK(chose_logistic);
}
