#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cellfit/dataset.hpp"
#include "cellfit/loss.hpp"

namespace cellfit {

// The selectable pool spans bias/variance regimes (constant .. knn);
// the last three are benchmark-only baselines and never enter a pool.
enum class LearnerId {
    constant,
    logistic,
    tree,
    naive_bayes,
    knn,
    lasso_logistic,
    random_forest,
    adaboost,
};

std::string to_string(LearnerId id);
LearnerId learner_id_from_string(const std::string& s);
bool is_benchmark_only(LearnerId id);

struct LogisticParams {
    double l2 = 1e-3;       // ridge weight on coefficients (intercept unpenalized)
    int max_iter = 2000;    // full-batch gradient descent with backtracking
    double grad_tol = 1e-6;
    bool operator==(const LogisticParams&) const = default;
};

struct TreeParams {
    int max_depth = 4;
    int min_leaf = 5;
    bool operator==(const TreeParams&) const = default;
};

struct NaiveBayesParams {
    double var_floor = 1e-9;
    bool operator==(const NaiveBayesParams&) const = default;
};

struct KnnParams {
    int k = 5; // standardized Euclidean metric
    bool operator==(const KnnParams&) const = default;
};

struct LassoParams {
    // proximal gradient on the logistic loss; lambda picked from a 7-point
    // logarithmic grid by held-out loss unless fixed_lambda is set
    int grid_points = 7;
    double grid_decades = 3.0;
    int max_iter = 1000;
    double tol = 1e-9;
    double holdout_fraction = 0.25;
    std::optional<double> fixed_lambda;
    bool operator==(const LassoParams&) const = default;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 8;
    int min_leaf = 1;
    bool bootstrap = true;
    int features_per_split = 0; // 0 = floor(sqrt(D)), floored at 1
    bool operator==(const ForestParams&) const = default;
};

struct AdaBoostParams {
    int rounds = 100; // exponential-reweighting over depth-1 stumps
    bool operator==(const AdaBoostParams&) const = default;
};

// Hyperparameters for every learner kind live side by side; only the block
// matching `id` is read. Keeps specs trivially copyable and serializable.
struct LearnerSpec {
    LearnerId id = LearnerId::constant;
    LogisticParams logistic;
    TreeParams tree;
    NaiveBayesParams naive_bayes;
    KnnParams knn;
    LassoParams lasso;
    ForestParams forest;
    AdaBoostParams adaboost;

    bool benchmark_only() const { return is_benchmark_only(id); }
    static LearnerSpec make(LearnerId id);

    bool operator==(const LearnerSpec&) const = default;
};

// The five-learner pool used by default (M = 5).
std::vector<LearnerSpec> default_pool();

// Benchmark-only baselines plus the two pool learners that double as
// standalone baselines, in report column order.
std::vector<LearnerSpec> default_baselines();

// ---- fitted states ----

struct ConstantModel {
    double p = 0.5; // Laplace-smoothed positive rate
    bool operator==(const ConstantModel&) const = default;
};

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
    bool operator==(const LogisticModel&) const = default;
};

struct TreeNode {
    int feature = -1; // -1 for leaves
    double threshold = 0.0;
    int left = -1;  // x[feature] <  threshold
    int right = -1; // x[feature] >= threshold
    double p = 0.5; // leaf estimate, Laplace-smoothed
    bool is_leaf() const { return left < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
    std::vector<TreeNode> nodes; // root at index 0
    bool operator==(const TreeModel&) const = default;
};

struct NaiveBayesModel {
    double prior_pos = 0.5;
    bool degenerate = false; // single-class fit; emits prior_pos directly
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;
    bool operator==(const NaiveBayesModel&) const = default;
};

struct KnnModel {
    int k = 5;
    std::vector<double> mean;
    std::vector<double> inv_sd; // 0 where the feature was constant
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    bool operator==(const KnnModel&) const = default;
};

struct LassoModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 0.0;
    bool operator==(const LassoModel&) const = default;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    bool operator==(const ForestModel&) const = default;
};

struct AdaBoostModel {
    struct Stump {
        int feature = 0;
        double threshold = 0.0;
        int polarity = 1; // +1: vote for class 1 when x >= threshold
        bool operator==(const Stump&) const = default;
    };
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    bool operator==(const AdaBoostModel&) const = default;
};

using PredictorState = std::variant<ConstantModel, LogisticModel, TreeModel, NaiveBayesModel,
                                    KnnModel, LassoModel, ForestModel, AdaBoostModel>;

// Immutable once fitted; safe to share across threads.
struct TrainedPredictor {
    LearnerSpec spec;
    PredictorState state;

    // pure; output in [0, 1]. Models that condition on features throw
    // std::invalid_argument on a dimension mismatch; the constant learner
    // ignores its input entirely. Schema-level dimension checking happens in
    // PartitionModel, which owns the feature contract.
    double predict_proba(std::span<const double> x) const;

    bool operator==(const TrainedPredictor&) const = default;
};

// Fits one learner on the selected rows. Deterministic for fixed
// (spec, data, rows, seed); an empty row set throws TrainError. A
// single-class subset still yields a valid predictor for every learner.
TrainedPredictor fit(const LearnerSpec& spec, const Dataset& data, std::span<const int> rows,
                     uint64_t seed);

// Unnormalized loss sum plus the row count, so the caller applies any
// global normalization exactly once. Empty rows -> (0, 0).
std::pair<double, int> eval_loss(const TrainedPredictor& predictor, const Dataset& data,
                                 std::span<const int> rows, LossKind kind);

// Regularized logistic objective and gradient at (weights, intercept);
// exposed so convergence can be verified against finite differences.
std::pair<double, std::vector<double>> logistic_objective(const Dataset& data,
                                                          std::span<const int> rows,
                                                          std::span<const double> weights,
                                                          double intercept, double l2);

} // namespace cellfit
