#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cellfit/config.hpp"
#include "cellfit/dataset.hpp"
#include "cellfit/learners.hpp"
#include "cellfit/model.hpp"

namespace cellfit {

using ProbaFn = std::function<double(std::span<const double>)>;

struct CellEvalRow {
    int cell_index = 0;
    std::string learner;
    int train_count = 0;
    int test_count = 0;
    double mean_loss = 0.0; // under the model's configured loss
};

struct EvalReport {
    int n = 0;
    double zero_one = 0.0; // mean losses over the evaluation set
    double log_loss = 0.0;
    double brier = 0.0;
    double accuracy = 0.0;
    std::vector<CellEvalRow> cells;
};

EvalReport evaluate_model(const PartitionModel& model, const Dataset& test);

// One confidence threshold X: an instance is confidently predicted when
// max(p, 1-p) >= X. `selected` counts those instances, `correct` the subset
// whose thresholded prediction matches the label, and realized_rate the
// empirical accuracy among the selected (0 when none are).
struct ConfidenceRow {
    double level = 0.0;
    int selected = 0;
    int correct = 0;
    double realized_rate = 0.0;
};

// The report thresholds used everywhere by default: {0.80, 0.85, 0.90, 0.95}.
std::span<const double> default_confidence_levels();

std::vector<ConfidenceRow> confidence_report(const ProbaFn& proba, const Dataset& data,
                                             std::span<const double> levels);

struct BenchmarkRow {
    std::string method;
    double zero_one = 0.0;
    double log_loss = 0.0;
    double brier = 0.0;
    double accuracy = 0.0;
    std::vector<ConfidenceRow> confidence;
    std::string error; // non-empty when this method failed to train; metrics zeroed
};

struct BenchmarkReport {
    std::vector<double> levels;
    std::vector<BenchmarkRow> rows; // rows[0] is the partition model
    // provenance header: enough to re-run the exact comparison
    std::uint64_t seed = 0;
    std::string loss;
    double alpha = 0.0;
    int gamma = 2;
    int n_train = 0;
    int n_test = 0;
    std::string train_fingerprint;
    std::string test_fingerprint;
};

// FNV-1a over the schema names, encoded feature bits, and labels, rendered
// as 16 hex digits. Identical datasets always fingerprint identically.
std::string dataset_fingerprint(const Dataset& data);

// Confident-prediction count of `row` at threshold `level` (0 when the row
// was not evaluated at that level).
int confident_count(const BenchmarkRow& row, double level);

// How many more instances the partition model predicts confidently at
// `level` than the best competing baseline does (negative when it trails).
int gain(const BenchmarkReport& report, double level);

// Fits the partition model on `train`, fits every baseline on the exact
// training rows the model saw (its validation rows are held out from the
// baselines too), and scores everything on `test`. A baseline that throws is
// reported as a failed row rather than aborting the comparison.
BenchmarkReport run_benchmark(const Dataset& train, const Dataset& test,
                              const std::vector<LearnerSpec>& pool,
                              const std::vector<LearnerSpec>& baselines, const FitConfig& config,
                              std::span<const double> levels);

struct TradeoffRow {
    int max_leaves = 0; // cap handed to the search
    int cells = 0;      // cells actually produced
    double objective = 0.0;
    double validation_loss = 0.0; // mean, configured loss
    double test_loss = 0.0;
};

// Re-runs training under increasing leaf caps to expose the fit/complexity
// trade-off on held-out data.
std::vector<TradeoffRow> tradeoff_curve(const Dataset& train, const Dataset& test,
                                        const std::vector<LearnerSpec>& pool,
                                        const FitConfig& config, std::span<const int> leaf_caps);

// One entry of a relevance ranking. `merit` is the correlation-based subset
// merit at the point the feature joined the forward-selection path, or its
// standalone merit when selection never reached it; `selected` marks members
// of the best subset found.
struct FeatureRank {
    int feature = 0;
    std::string name;
    double merit = 0.0;
    bool selected = false;
};

struct CellFeatureRanking {
    int cell_index = 0;
    int count = 0;           // instances of `data` landing in this cell
    bool sufficient = true;  // false when count is too small to rank (< 10)
    std::vector<FeatureRank> ranking;
};

struct FeatureReport {
    int top_k = 10;
    std::vector<FeatureRank> global;        // ranking over all instances
    std::vector<CellFeatureRanking> cells;  // one ranking per model cell
};

// Per-cell feature relevance: runs correlation-based forward selection on
// the instances inside each cell (and once globally) and reports the top_k
// features per scope.
FeatureReport partition_feature_report(const PartitionModel& model, const Dataset& data,
                                       int top_k = 10);

// Serializations are byte-stable: ordered keys, shortest round-trip floats.
std::string report_to_json(const EvalReport& report);
std::string report_to_json(const BenchmarkReport& report);
std::string report_to_json(std::span<const TradeoffRow> rows);
std::string report_to_json(const FeatureReport& report);

std::string report_to_text(const EvalReport& report);
std::string report_to_text(const BenchmarkReport& report);
std::string report_to_text(std::span<const TradeoffRow> rows);
std::string report_to_text(const FeatureReport& report);

} // namespace cellfit
