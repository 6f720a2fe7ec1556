#include "cellfit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cellfit/errors.hpp"
#include "cellfit/rng.hpp"

namespace cellfit {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
double log1pexp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double laplace_rate(int positives, int count) {
    return (static_cast<double>(positives) + 1.0) / (static_cast<double>(count) + 2.0);
}

void check_dimension(size_t got, size_t want) {
    if (got != want)
        throw std::invalid_argument("feature vector has dimension " + std::to_string(got) +
                                    ", model expects " + std::to_string(want));
}

// ---- decision trees (shared by tree, random_forest) ----

struct TreeBuildParams {
    int max_depth = 4;
    int min_leaf = 5;
    int mtry = 0; // features examined per node; 0 = all
};

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double cost = std::numeric_limits<double>::infinity(); // weighted child impurity
};

// 2 * pos * neg / n: row-count-weighted gini impurity of one side
double weighted_gini(double pos, double n) {
    if (n <= 0.0) return 0.0;
    return 2.0 * pos * (n - pos) / n;
}

BestSplit find_split(const Dataset& data, const std::vector<int>& rows,
                     const std::vector<int>& features, int min_leaf) {
    const int n = static_cast<int>(rows.size());
    BestSplit best;
    std::vector<std::pair<double, int>> vals(static_cast<size_t>(n)); // (value, label)
    for (int f : features) {
        for (int i = 0; i < n; ++i) {
            const auto& inst = data.instances[static_cast<size_t>(rows[static_cast<size_t>(i)])];
            vals[static_cast<size_t>(i)] = {inst.x[static_cast<size_t>(f)], inst.y};
        }
        std::sort(vals.begin(), vals.end());
        // prefix positives: pos[i] = positives among the first i sorted rows
        double pos_total = 0.0;
        for (const auto& [v, y] : vals) pos_total += y;
        double pos_left = 0.0;
        for (int i = 1; i < n; ++i) {
            pos_left += vals[static_cast<size_t>(i - 1)].second;
            if (vals[static_cast<size_t>(i)].first == vals[static_cast<size_t>(i - 1)].first)
                continue; // not a value boundary
            if (i < min_leaf || n - i < min_leaf) continue;
            const double cost = weighted_gini(pos_left, i) +
                                weighted_gini(pos_total - pos_left, n - i);
            if (cost < best.cost - 1e-12) {
                best.feature = f;
                best.threshold = 0.5 * (vals[static_cast<size_t>(i - 1)].first +
                                        vals[static_cast<size_t>(i)].first);
                best.cost = cost;
            }
        }
    }
    return best;
}

TreeModel build_tree(const Dataset& data, std::vector<int> rows, const TreeBuildParams& params,
                     Rng* rng) {
    TreeModel tree;
    const int dim = data.dimension();
    std::vector<int> all_features(static_cast<size_t>(dim));
    std::iota(all_features.begin(), all_features.end(), 0);

    struct Frame {
        std::vector<int> rows;
        int depth;
        int node;
    };
    tree.nodes.emplace_back();
    std::vector<Frame> stack;
    stack.push_back({std::move(rows), 0, 0});

    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        const int n = static_cast<int>(fr.rows.size());
        int pos = 0;
        for (int r : fr.rows) pos += data.instances[static_cast<size_t>(r)].y;
        TreeNode& node = tree.nodes[static_cast<size_t>(fr.node)];
        node.p = laplace_rate(pos, n);

        if (fr.depth >= params.max_depth || n < 2 * params.min_leaf || pos == 0 || pos == n)
            continue; // leaf

        std::vector<int> features;
        if (params.mtry > 0 && params.mtry < dim) {
            // partial Fisher-Yates picks the subset; sorting it keeps the
            // lowest-feature tie-break independent of draw order
            std::vector<int> pool = all_features;
            features.reserve(static_cast<size_t>(params.mtry));
            for (int i = 0; i < params.mtry; ++i) {
                const auto j = static_cast<size_t>(i) +
                               static_cast<size_t>(rng->uniform_int(pool.size() - static_cast<size_t>(i)));
                std::swap(pool[static_cast<size_t>(i)], pool[j]);
                features.push_back(pool[static_cast<size_t>(i)]);
            }
            std::sort(features.begin(), features.end());
        } else {
            features = all_features;
        }

        const BestSplit split = find_split(data, fr.rows, features, params.min_leaf);
        const double parent_cost = weighted_gini(pos, n);
        if (split.feature < 0 || split.cost >= parent_cost - 1e-12) continue;

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(fr.rows.size());
        right_rows.reserve(fr.rows.size());
        for (int r : fr.rows) {
            const double v =
                data.instances[static_cast<size_t>(r)].x[static_cast<size_t>(split.feature)];
            (v < split.threshold ? left_rows : right_rows).push_back(r);
        }
        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[static_cast<size_t>(fr.node)];
        parent.feature = split.feature;
        parent.threshold = split.threshold;
        parent.left = left_id;
        parent.right = left_id + 1;
        // push right first so the left child is processed (and numbered) in
        // stack order matching its node id
        stack.push_back({std::move(right_rows), fr.depth + 1, left_id + 1});
        stack.push_back({std::move(left_rows), fr.depth + 1, left_id});
    }
    return tree;
}

double tree_proba(const TreeModel& tree, std::span<const double> x) {
    int node = 0;
    while (!tree.nodes[static_cast<size_t>(node)].is_leaf()) {
        const TreeNode& nd = tree.nodes[static_cast<size_t>(node)];
        if (static_cast<size_t>(nd.feature) >= x.size())
            throw std::invalid_argument("feature vector too short for tree split axis");
        node = x[static_cast<size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
    }
    return tree.nodes[static_cast<size_t>(node)].p;
}

// ---- logistic regression ----

LogisticModel fit_logistic(const Dataset& data, std::span<const int> rows,
                           const LogisticParams& params) {
    const int dim = data.dimension();
    std::vector<double> w(static_cast<size_t>(dim), 0.0);
    double b = 0.0;

    auto objective = [&](const std::vector<double>& weights, double intercept) {
        return logistic_objective(data, rows, weights, intercept, params.l2).first;
    };

    double f = 0.0;
    std::vector<double> grad;
    std::tie(f, grad) = logistic_objective(data, rows, w, b, params.l2);
    std::vector<double> trial_w(w.size());

    for (int iter = 0; iter < params.max_iter; ++iter) {
        double gnorm2 = 0.0, gmax = 0.0;
        for (double g : grad) {
            gnorm2 += g * g;
            gmax = std::max(gmax, std::abs(g));
        }
        if (gmax < params.grad_tol) break;

        // backtracking line search with the Armijo condition
        double step = 1.0;
        double trial_b = b;
        double f_trial = f;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t j = 0; j < w.size(); ++j) trial_w[j] = w[j] - step * grad[j];
            trial_b = b - step * grad[w.size()];
            f_trial = objective(trial_w, trial_b);
            if (f_trial <= f - 1e-4 * step * gnorm2) break;
            step *= 0.5;
        }
        if (f_trial >= f) break; // line search stalled
        w = trial_w;
        b = trial_b;
        std::tie(f, grad) = logistic_objective(data, rows, w, b, params.l2);
    }
    return LogisticModel{std::move(w), b};
}

double linear_proba(std::span<const double> weights, double intercept,
                    std::span<const double> x) {
    check_dimension(x.size(), weights.size());
    double z = intercept;
    for (size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return sigmoid(z);
}

// ---- gaussian naive bayes ----

NaiveBayesModel fit_naive_bayes(const Dataset& data, std::span<const int> rows,
                                const NaiveBayesParams& params) {
    const auto dim = static_cast<size_t>(data.dimension());
    const int n = static_cast<int>(rows.size());
    int pos = 0;
    for (int r : rows) pos += data.instances[static_cast<size_t>(r)].y;

    NaiveBayesModel model;
    model.prior_pos = laplace_rate(pos, n);
    if (pos == 0 || pos == n) {
        // a single-class subset has no per-class geometry; fall back to the
        // smoothed prior
        model.degenerate = true;
        return model;
    }
    for (int c = 0; c < 2; ++c) {
        model.mean[static_cast<size_t>(c)].assign(dim, 0.0);
        model.var[static_cast<size_t>(c)].assign(dim, 0.0);
    }
    const std::array<double, 2> counts = {static_cast<double>(n - pos), static_cast<double>(pos)};
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        auto& mean = model.mean[static_cast<size_t>(inst.y)];
        for (size_t j = 0; j < dim; ++j) mean[j] += inst.x[j];
    }
    for (int c = 0; c < 2; ++c)
        for (size_t j = 0; j < dim; ++j) model.mean[static_cast<size_t>(c)][j] /= counts[static_cast<size_t>(c)];
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        auto& mean = model.mean[static_cast<size_t>(inst.y)];
        auto& var = model.var[static_cast<size_t>(inst.y)];
        for (size_t j = 0; j < dim; ++j) {
            const double d = inst.x[j] - mean[j];
            var[j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (size_t j = 0; j < dim; ++j) {
            double& v = model.var[static_cast<size_t>(c)][j];
            v = std::max(v / counts[static_cast<size_t>(c)], params.var_floor);
        }
    return model;
}

double naive_bayes_proba(const NaiveBayesModel& model, std::span<const double> x) {
    if (model.degenerate) return model.prior_pos;
    check_dimension(x.size(), model.mean[0].size());
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    std::array<double, 2> score = {std::log(1.0 - model.prior_pos), std::log(model.prior_pos)};
    for (int c = 0; c < 2; ++c) {
        const auto& mean = model.mean[static_cast<size_t>(c)];
        const auto& var = model.var[static_cast<size_t>(c)];
        for (size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - mean[j];
            score[static_cast<size_t>(c)] -= 0.5 * (kLog2Pi + std::log(var[j]) + d * d / var[j]);
        }
    }
    return sigmoid(score[1] - score[0]);
}

// ---- k nearest neighbours ----

KnnModel fit_knn(const Dataset& data, std::span<const int> rows, const KnnParams& params) {
    const auto dim = static_cast<size_t>(data.dimension());
    const auto n = rows.size();
    KnnModel model;
    model.k = params.k;
    model.mean.assign(dim, 0.0);
    model.inv_sd.assign(dim, 0.0);
    for (int r : rows) {
        const auto& xr = data.instances[static_cast<size_t>(r)].x;
        for (size_t j = 0; j < dim; ++j) model.mean[j] += xr[j];
    }
    for (size_t j = 0; j < dim; ++j) model.mean[j] /= static_cast<double>(n);
    std::vector<double> ss(dim, 0.0);
    for (int r : rows) {
        const auto& xr = data.instances[static_cast<size_t>(r)].x;
        for (size_t j = 0; j < dim; ++j) {
            const double d = xr[j] - model.mean[j];
            ss[j] += d * d;
        }
    }
    for (size_t j = 0; j < dim; ++j) {
        const double sd = std::sqrt(ss[j] / static_cast<double>(n));
        model.inv_sd[j] = sd > 0.0 ? 1.0 / sd : 0.0; // constant feature carries no signal
    }
    model.points.reserve(n);
    model.labels.reserve(n);
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        std::vector<double> z(dim);
        for (size_t j = 0; j < dim; ++j) z[j] = (inst.x[j] - model.mean[j]) * model.inv_sd[j];
        model.points.push_back(std::move(z));
        model.labels.push_back(inst.y);
    }
    return model;
}

double knn_proba(const KnnModel& model, std::span<const double> x) {
    check_dimension(x.size(), model.mean.size());
    const auto n = model.points.size();
    const auto k_eff = std::min<size_t>(static_cast<size_t>(model.k), n);
    std::vector<double> z(x.size());
    for (size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - model.mean[j]) * model.inv_sd[j];

    std::vector<std::pair<double, size_t>> dist(n); // (squared distance, insertion index)
    for (size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        const auto& p = model.points[i];
        for (size_t j = 0; j < z.size(); ++j) {
            const double d = z[j] - p[j];
            d2 += d * d;
        }
        dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff), dist.end());
    int pos = 0;
    for (size_t i = 0; i < k_eff; ++i) pos += model.labels[dist[i].second];
    return laplace_rate(pos, static_cast<int>(k_eff));
}

// ---- lasso-penalized logistic regression ----

struct SmoothEval {
    double value = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};

SmoothEval lasso_smooth(const Dataset& data, std::span<const int> rows,
                        const std::vector<double>& w, double b) {
    SmoothEval out;
    out.grad_w.assign(w.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        double z = b;
        for (size_t j = 0; j < w.size(); ++j) z += w[j] * inst.x[j];
        out.value += inst.y == 1 ? log1pexp(-z) : log1pexp(z);
        const double resid = sigmoid(z) - static_cast<double>(inst.y);
        for (size_t j = 0; j < w.size(); ++j) out.grad_w[j] += resid * inst.x[j];
        out.grad_b += resid;
    }
    out.value *= inv_n;
    for (auto& g : out.grad_w) g *= inv_n;
    out.grad_b *= inv_n;
    return out;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// proximal gradient (ISTA) with backtracking on the smooth part
LassoModel fit_lasso_at(const Dataset& data, std::span<const int> rows, double lambda,
                        const LassoParams& params, LassoModel warm) {
    std::vector<double> w = std::move(warm.weights);
    if (w.size() != static_cast<size_t>(data.dimension()))
        w.assign(static_cast<size_t>(data.dimension()), 0.0);
    double b = warm.intercept;

    double step = 1.0;
    SmoothEval cur = lasso_smooth(data, rows, w, b);
    std::vector<double> w_new(w.size());
    for (int iter = 0; iter < params.max_iter; ++iter) {
        double b_new = b;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t j = 0; j < w.size(); ++j)
                w_new[j] = soft_threshold(w[j] - step * cur.grad_w[j], step * lambda);
            b_new = b - step * cur.grad_b;
            // quadratic upper-bound test for the smooth part
            double lin = 0.0, sq = 0.0;
            for (size_t j = 0; j < w.size(); ++j) {
                const double d = w_new[j] - w[j];
                lin += cur.grad_w[j] * d;
                sq += d * d;
            }
            const double db = b_new - b;
            lin += cur.grad_b * db;
            sq += db * db;
            const double smooth_new = lasso_smooth(data, rows, w_new, b_new).value;
            if (smooth_new <= cur.value + lin + sq / (2.0 * step) + 1e-15) break;
            step *= 0.5;
        }
        double delta = std::abs(b_new - b);
        for (size_t j = 0; j < w.size(); ++j) delta = std::max(delta, std::abs(w_new[j] - w[j]));
        w.swap(w_new);
        b = b_new;
        if (delta < params.tol) break;
        cur = lasso_smooth(data, rows, w, b);
        step = std::min(step * 2.0, 1.0); // cautiously re-grow the step
    }
    return LassoModel{std::move(w), b, lambda};
}

double lasso_lambda_max(const Dataset& data, std::span<const int> rows) {
    const auto dim = static_cast<size_t>(data.dimension());
    double ybar = 0.0;
    for (int r : rows) ybar += data.instances[static_cast<size_t>(r)].y;
    ybar /= static_cast<double>(rows.size());
    std::vector<double> corr(dim, 0.0);
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        const double resid = static_cast<double>(inst.y) - ybar;
        for (size_t j = 0; j < dim; ++j) corr[j] += inst.x[j] * resid;
    }
    double best = 0.0;
    for (double c : corr) best = std::max(best, std::abs(c) / static_cast<double>(rows.size()));
    return best;
}

LassoModel fit_lasso(const Dataset& data, std::span<const int> rows, const LassoParams& params,
                     uint64_t seed) {
    if (params.fixed_lambda)
        return fit_lasso_at(data, rows, *params.fixed_lambda, params, LassoModel{});

    const double lambda_max = lasso_lambda_max(data, rows);
    if (lambda_max < 1e-300) {
        // nothing correlates with the label; intercept-only
        int pos = 0;
        for (int r : rows) pos += data.instances[static_cast<size_t>(r)].y;
        const double p = laplace_rate(pos, static_cast<int>(rows.size()));
        LassoModel model;
        model.weights.assign(static_cast<size_t>(data.dimension()), 0.0);
        model.intercept = std::log(p / (1.0 - p));
        return model;
    }

    std::vector<double> grid(static_cast<size_t>(params.grid_points));
    for (int t = 0; t < params.grid_points; ++t)
        grid[static_cast<size_t>(t)] =
            lambda_max * std::pow(10.0, -params.grid_decades * t / (params.grid_points - 1));

    // internal holdout picks lambda; ties prefer the sparser (larger) lambda
    std::vector<int> shuffled(rows.begin(), rows.end());
    Rng rng(derive_seed(seed, SeedStream::learner, 17));
    rng.shuffle(shuffled);
    const auto n = shuffled.size();
    auto holdout_n = static_cast<size_t>(std::lround(static_cast<double>(n) * params.holdout_fraction));
    holdout_n = std::clamp<size_t>(holdout_n, 1, n - 1);
    std::vector<int> inner_train(shuffled.begin(), shuffled.end() - static_cast<std::ptrdiff_t>(holdout_n));
    std::vector<int> holdout(shuffled.end() - static_cast<std::ptrdiff_t>(holdout_n), shuffled.end());
    std::sort(inner_train.begin(), inner_train.end());
    std::sort(holdout.begin(), holdout.end());

    double best_loss = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    LassoModel warm;
    for (double lambda : grid) {
        warm = fit_lasso_at(data, inner_train, lambda, params, std::move(warm));
        double loss = 0.0;
        for (int r : holdout) {
            const auto& inst = data.instances[static_cast<size_t>(r)];
            loss += pointwise_loss(linear_proba(warm.weights, warm.intercept, inst.x), inst.y,
                                   LossKind::log_loss);
        }
        if (loss < best_loss - 1e-12) {
            best_loss = loss;
            best_lambda = lambda;
        }
    }
    return fit_lasso_at(data, rows, best_lambda, params, LassoModel{});
}

// ---- random forest ----

ForestModel fit_forest(const Dataset& data, std::span<const int> rows, const ForestParams& params,
                       uint64_t seed) {
    ForestModel model;
    model.trees.reserve(static_cast<size_t>(params.n_trees));
    const int dim = data.dimension();
    int mtry = params.features_per_split;
    if (mtry <= 0) mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(dim))));

    TreeBuildParams tp;
    tp.max_depth = params.max_depth;
    tp.min_leaf = params.min_leaf;
    tp.mtry = mtry;

    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, SeedStream::learner, 100 + static_cast<uint64_t>(t)));
        std::vector<int> boot;
        boot.reserve(rows.size());
        if (params.bootstrap) {
            for (size_t i = 0; i < rows.size(); ++i)
                boot.push_back(rows[static_cast<size_t>(rng.uniform_int(rows.size()))]);
            // sorted resample keeps node-building order independent of draw order
            std::sort(boot.begin(), boot.end());
        } else {
            boot.assign(rows.begin(), rows.end());
        }
        model.trees.push_back(build_tree(data, std::move(boot), tp, &rng));
    }
    return model;
}

double forest_proba(const ForestModel& model, std::span<const double> x) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree_proba(tree, x);
    return sum / static_cast<double>(model.trees.size());
}

// ---- adaboost over decision stumps ----

struct StumpSearch {
    AdaBoostModel::Stump stump;
    double error = std::numeric_limits<double>::infinity();
};

// weights must sum to 1; candidates are value midpoints plus the
// all-on-one-side cut at the minimum value
StumpSearch best_stump(const Dataset& data, std::span<const int> rows,
                       const std::vector<double>& weights) {
    const int dim = data.dimension();
    StumpSearch best;
    std::vector<std::pair<double, size_t>> order(rows.size()); // (value, weight index)
    for (int f = 0; f < dim; ++f) {
        for (size_t i = 0; i < rows.size(); ++i)
            order[i] = {data.instances[static_cast<size_t>(rows[i])].x[static_cast<size_t>(f)], i};
        std::sort(order.begin(), order.end());
        double wpos_total = 0.0;
        for (size_t i = 0; i < rows.size(); ++i)
            if (data.instances[static_cast<size_t>(rows[i])].y == 1) wpos_total += weights[i];
        const double wtotal = std::accumulate(weights.begin(), weights.end(), 0.0);

        double wpos_below = 0.0, w_below = 0.0;
        for (size_t i = 0; i <= rows.size(); ++i) {
            double threshold;
            if (i == 0) {
                threshold = order.front().first; // nothing below: constant vote
            } else {
                const auto& inst = data.instances[static_cast<size_t>(rows[order[i - 1].second])];
                const double y = inst.y;
                wpos_below += y == 1 ? weights[order[i - 1].second] : 0.0;
                w_below += weights[order[i - 1].second];
                if (i == rows.size()) break; // mirror of the i == 0 candidate
                if (order[i].first == order[i - 1].first) continue;
                threshold = 0.5 * (order[i - 1].first + order[i].first);
            }
            // polarity +1 votes class 1 at x >= threshold
            const double err_plus = wpos_below + (wtotal - w_below - (wpos_total - wpos_below));
            const double err_minus = wtotal - err_plus;
            if (err_plus < best.error - 1e-15) {
                best.error = err_plus;
                best.stump = {f, threshold, 1};
            }
            if (err_minus < best.error - 1e-15) {
                best.error = err_minus;
                best.stump = {f, threshold, -1};
            }
        }
    }
    return best;
}

int stump_vote(const AdaBoostModel::Stump& s, std::span<const double> x) {
    const int above = x[static_cast<size_t>(s.feature)] >= s.threshold ? 1 : -1;
    return s.polarity > 0 ? above : -above;
}

AdaBoostModel fit_adaboost(const Dataset& data, std::span<const int> rows,
                           const AdaBoostParams& params) {
    AdaBoostModel model;
    std::vector<double> weights(rows.size(), 1.0 / static_cast<double>(rows.size()));
    for (int t = 0; t < params.rounds; ++t) {
        StumpSearch found = best_stump(data, rows, weights);
        if (found.stump.feature < 0) break;
        const double eps = std::clamp(found.error, 1e-10, 1.0 - 1e-10);
        if (eps >= 0.5) break; // no edge left
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        model.stumps.push_back(found.stump);
        model.alphas.push_back(alpha);
        if (found.error < 1e-10) break; // perfect stump; further rounds are noise

        double wsum = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const int y_pm = data.instances[static_cast<size_t>(rows[i])].y == 1 ? 1 : -1;
            const int vote = stump_vote(found.stump, data.instances[static_cast<size_t>(rows[i])].x);
            weights[i] *= std::exp(-alpha * y_pm * vote);
            wsum += weights[i];
        }
        for (auto& w : weights) w /= wsum;
    }
    return model;
}

double adaboost_proba(const AdaBoostModel& model, std::span<const double> x) {
    if (model.stumps.empty()) return 0.5;
    double f = 0.0;
    for (size_t t = 0; t < model.stumps.size(); ++t)
        f += model.alphas[t] * stump_vote(model.stumps[t], x);
    return sigmoid(2.0 * f); // margin-to-probability map for exponential loss
}

} // namespace

std::string to_string(LearnerId id) {
    switch (id) {
        case LearnerId::constant: return "constant";
        case LearnerId::logistic: return "logistic";
        case LearnerId::tree: return "tree";
        case LearnerId::naive_bayes: return "naive_bayes";
        case LearnerId::knn: return "knn";
        case LearnerId::lasso_logistic: return "lasso_logistic";
        case LearnerId::random_forest: return "random_forest";
        case LearnerId::adaboost: return "adaboost";
    }
    return "constant";
}

LearnerId learner_id_from_string(const std::string& s) {
    if (s == "constant") return LearnerId::constant;
    if (s == "logistic") return LearnerId::logistic;
    if (s == "tree") return LearnerId::tree;
    if (s == "naive_bayes") return LearnerId::naive_bayes;
    if (s == "knn") return LearnerId::knn;
    if (s == "lasso_logistic") return LearnerId::lasso_logistic;
    if (s == "random_forest") return LearnerId::random_forest;
    if (s == "adaboost") return LearnerId::adaboost;
    throw std::invalid_argument("unknown learner id: " + s);
}

bool is_benchmark_only(LearnerId id) {
    return id == LearnerId::lasso_logistic || id == LearnerId::random_forest ||
           id == LearnerId::adaboost;
}

LearnerSpec LearnerSpec::make(LearnerId id) {
    LearnerSpec spec;
    spec.id = id;
    return spec;
}

std::vector<LearnerSpec> default_pool() {
    return {LearnerSpec::make(LearnerId::constant), LearnerSpec::make(LearnerId::logistic),
            LearnerSpec::make(LearnerId::tree), LearnerSpec::make(LearnerId::naive_bayes),
            LearnerSpec::make(LearnerId::knn)};
}

std::vector<LearnerSpec> default_baselines() {
    return {LearnerSpec::make(LearnerId::logistic), LearnerSpec::make(LearnerId::lasso_logistic),
            LearnerSpec::make(LearnerId::tree), LearnerSpec::make(LearnerId::random_forest),
            LearnerSpec::make(LearnerId::adaboost)};
}

std::pair<double, std::vector<double>> logistic_objective(const Dataset& data,
                                                          std::span<const int> rows,
                                                          std::span<const double> weights,
                                                          double intercept, double l2) {
    // gradient layout: one entry per weight, intercept last
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double value = 0.0;
    std::vector<double> grad(weights.size() + 1, 0.0);
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        double z = intercept;
        for (size_t j = 0; j < weights.size(); ++j) z += weights[j] * inst.x[j];
        value += inst.y == 1 ? log1pexp(-z) : log1pexp(z);
        const double resid = sigmoid(z) - static_cast<double>(inst.y);
        for (size_t j = 0; j < weights.size(); ++j) grad[j] += resid * inst.x[j];
        grad[weights.size()] += resid;
    }
    value *= inv_n;
    for (auto& g : grad) g *= inv_n;
    for (size_t j = 0; j < weights.size(); ++j) {
        value += 0.5 * l2 * weights[j] * weights[j];
        grad[j] += l2 * weights[j];
    }
    return {value, std::move(grad)};
}

TrainedPredictor fit(const LearnerSpec& spec, const Dataset& data, std::span<const int> rows,
                     uint64_t seed) {
    if (rows.empty()) throw TrainError("cannot fit " + to_string(spec.id) + " on an empty row set");
    for (int r : rows) {
        if (r < 0 || r >= data.size()) throw TrainError("row index out of range");
        for (double v : data.instances[static_cast<size_t>(r)].x)
            if (std::isnan(v))
                throw TrainError("training rows contain missing values; impute before fitting");
    }

    TrainedPredictor out;
    out.spec = spec;
    switch (spec.id) {
        case LearnerId::constant: {
            int pos = 0;
            for (int r : rows) pos += data.instances[static_cast<size_t>(r)].y;
            out.state = ConstantModel{laplace_rate(pos, static_cast<int>(rows.size()))};
            break;
        }
        case LearnerId::logistic:
            out.state = fit_logistic(data, rows, spec.logistic);
            break;
        case LearnerId::tree: {
            TreeBuildParams tp;
            tp.max_depth = spec.tree.max_depth;
            tp.min_leaf = spec.tree.min_leaf;
            out.state = build_tree(data, std::vector<int>(rows.begin(), rows.end()), tp, nullptr);
            break;
        }
        case LearnerId::naive_bayes:
            out.state = fit_naive_bayes(data, rows, spec.naive_bayes);
            break;
        case LearnerId::knn:
            out.state = fit_knn(data, rows, spec.knn);
            break;
        case LearnerId::lasso_logistic:
            out.state = fit_lasso(data, rows, spec.lasso, seed);
            break;
        case LearnerId::random_forest:
            out.state = fit_forest(data, rows, spec.forest, seed);
            break;
        case LearnerId::adaboost:
            out.state = fit_adaboost(data, rows, spec.adaboost);
            break;
    }
    return out;
}

double TrainedPredictor::predict_proba(std::span<const double> x) const {
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                return model.p;
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                return linear_proba(model.weights, model.intercept, x);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_proba(model, x);
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                return naive_bayes_proba(model, x);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_proba(model, x);
            } else if constexpr (std::is_same_v<T, LassoModel>) {
                return linear_proba(model.weights, model.intercept, x);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                return forest_proba(model, x);
            } else {
                return adaboost_proba(model, x);
            }
        },
        state);
}

std::pair<double, int> eval_loss(const TrainedPredictor& predictor, const Dataset& data,
                                 std::span<const int> rows, LossKind kind) {
    double sum = 0.0;
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        sum += pointwise_loss(predictor.predict_proba(inst.x), inst.y, kind);
    }
    return {sum, static_cast<int>(rows.size())};
}

} // namespace cellfit
