#include "cellfit/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cellfit/errors.hpp"
#include "cellfit/version.hpp"
#include "num_format.hpp"

namespace cellfit {
namespace {

using ordered_json = nlohmann::ordered_json;
using detail::dtos;
using detail::stod_exact;

ordered_json doubles_to_json(const std::vector<double>& values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) arr.push_back(dtos(v));
    return arr;
}

std::vector<double> doubles_from_json(const ordered_json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& item : arr) out.push_back(stod_exact(item.get<std::string>()));
    return out;
}

// ---- schema ----

ordered_json schema_to_json(const FeatureSchema& schema) {
    ordered_json features = ordered_json::array();
    for (const auto& f : schema.features) {
        ordered_json jf;
        jf["name"] = f.name;
        jf["kind"] = to_string(f.kind);
        if (f.kind == FeatureKind::categorical) jf["categories"] = f.categories;
        jf["mean"] = dtos(f.mean);
        jf["sd"] = dtos(f.sd);
        jf["standardized"] = f.standardized;
        features.push_back(std::move(jf));
    }
    ordered_json out;
    out["label_name"] = schema.label_name;
    out["features"] = std::move(features);
    return out;
}

FeatureSchema schema_from_json(const ordered_json& j) {
    FeatureSchema schema;
    schema.label_name = j.at("label_name").get<std::string>();
    for (const auto& jf : j.at("features")) {
        FeatureSpec f;
        f.name = jf.at("name").get<std::string>();
        f.kind = feature_kind_from_string(jf.at("kind").get<std::string>());
        if (jf.contains("categories")) f.categories = jf["categories"].get<std::vector<std::string>>();
        f.mean = stod_exact(jf.at("mean").get<std::string>());
        f.sd = stod_exact(jf.at("sd").get<std::string>());
        f.standardized = jf.at("standardized").get<bool>();
        schema.features.push_back(std::move(f));
    }
    return schema;
}

// ---- config ----

ordered_json config_to_json(const FitConfig& config) {
    ordered_json j;
    j["gamma"] = config.gamma;
    j["alpha"] = dtos(config.alpha);
    if (config.delta) j["delta"] = dtos(*config.delta);
    j["k_assumed"] = config.k_assumed;
    j["loss"] = to_string(config.loss);
    j["M"] = config.M;
    j["s_min"] = config.s_min;
    j["v_min"] = config.v_min;
    j["validation_fraction"] = dtos(config.validation_fraction);
    j["seed"] = config.seed;
    if (config.max_leaves) j["max_leaves"] = *config.max_leaves;
    j["max_cuts_per_dim"] = config.max_cuts_per_dim;
    j["improvement_tol"] = dtos(config.improvement_tol);
    j["threads"] = config.threads;
    return j;
}

FitConfig config_from_json(const ordered_json& j) {
    FitConfig config;
    config.gamma = j.at("gamma").get<int>();
    config.alpha = stod_exact(j.at("alpha").get<std::string>());
    if (j.contains("delta")) config.delta = stod_exact(j["delta"].get<std::string>());
    config.k_assumed = j.at("k_assumed").get<int>();
    config.loss = loss_kind_from_string(j.at("loss").get<std::string>());
    config.M = j.at("M").get<int>();
    config.s_min = j.at("s_min").get<int>();
    config.v_min = j.at("v_min").get<int>();
    config.validation_fraction = stod_exact(j.at("validation_fraction").get<std::string>());
    config.seed = j.at("seed").get<uint64_t>();
    if (j.contains("max_leaves")) config.max_leaves = j["max_leaves"].get<int>();
    config.max_cuts_per_dim = j.at("max_cuts_per_dim").get<int>();
    config.improvement_tol = stod_exact(j.at("improvement_tol").get<std::string>());
    config.threads = j.at("threads").get<int>();
    return config;
}

// ---- learner specs ----

ordered_json spec_to_json(const LearnerSpec& spec) {
    ordered_json params;
    switch (spec.id) {
        case LearnerId::constant: break;
        case LearnerId::logistic:
            params["l2"] = dtos(spec.logistic.l2);
            params["max_iter"] = spec.logistic.max_iter;
            params["grad_tol"] = dtos(spec.logistic.grad_tol);
            break;
        case LearnerId::tree:
            params["max_depth"] = spec.tree.max_depth;
            params["min_leaf"] = spec.tree.min_leaf;
            break;
        case LearnerId::naive_bayes:
            params["var_floor"] = dtos(spec.naive_bayes.var_floor);
            break;
        case LearnerId::knn:
            params["k"] = spec.knn.k;
            break;
        case LearnerId::lasso_logistic:
            params["grid_points"] = spec.lasso.grid_points;
            params["grid_decades"] = dtos(spec.lasso.grid_decades);
            params["max_iter"] = spec.lasso.max_iter;
            params["tol"] = dtos(spec.lasso.tol);
            params["holdout_fraction"] = dtos(spec.lasso.holdout_fraction);
            if (spec.lasso.fixed_lambda) params["fixed_lambda"] = dtos(*spec.lasso.fixed_lambda);
            break;
        case LearnerId::random_forest:
            params["n_trees"] = spec.forest.n_trees;
            params["max_depth"] = spec.forest.max_depth;
            params["min_leaf"] = spec.forest.min_leaf;
            params["bootstrap"] = spec.forest.bootstrap;
            params["features_per_split"] = spec.forest.features_per_split;
            break;
        case LearnerId::adaboost:
            params["rounds"] = spec.adaboost.rounds;
            break;
    }
    ordered_json j;
    j["id"] = to_string(spec.id);
    j["params"] = std::move(params);
    return j;
}

LearnerSpec spec_from_json(const ordered_json& j) {
    LearnerSpec spec;
    spec.id = learner_id_from_string(j.at("id").get<std::string>());
    const auto& params = j.at("params");
    switch (spec.id) {
        case LearnerId::constant: break;
        case LearnerId::logistic:
            spec.logistic.l2 = stod_exact(params.at("l2").get<std::string>());
            spec.logistic.max_iter = params.at("max_iter").get<int>();
            spec.logistic.grad_tol = stod_exact(params.at("grad_tol").get<std::string>());
            break;
        case LearnerId::tree:
            spec.tree.max_depth = params.at("max_depth").get<int>();
            spec.tree.min_leaf = params.at("min_leaf").get<int>();
            break;
        case LearnerId::naive_bayes:
            spec.naive_bayes.var_floor = stod_exact(params.at("var_floor").get<std::string>());
            break;
        case LearnerId::knn:
            spec.knn.k = params.at("k").get<int>();
            break;
        case LearnerId::lasso_logistic:
            spec.lasso.grid_points = params.at("grid_points").get<int>();
            spec.lasso.grid_decades = stod_exact(params.at("grid_decades").get<std::string>());
            spec.lasso.max_iter = params.at("max_iter").get<int>();
            spec.lasso.tol = stod_exact(params.at("tol").get<std::string>());
            spec.lasso.holdout_fraction =
                stod_exact(params.at("holdout_fraction").get<std::string>());
            if (params.contains("fixed_lambda"))
                spec.lasso.fixed_lambda = stod_exact(params["fixed_lambda"].get<std::string>());
            break;
        case LearnerId::random_forest:
            spec.forest.n_trees = params.at("n_trees").get<int>();
            spec.forest.max_depth = params.at("max_depth").get<int>();
            spec.forest.min_leaf = params.at("min_leaf").get<int>();
            spec.forest.bootstrap = params.at("bootstrap").get<bool>();
            spec.forest.features_per_split = params.at("features_per_split").get<int>();
            break;
        case LearnerId::adaboost:
            spec.adaboost.rounds = params.at("rounds").get<int>();
            break;
    }
    return spec;
}

// ---- fitted predictor states ----

ordered_json tree_to_json(const TreeModel& tree) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : tree.nodes) {
        ordered_json jn;
        jn["feature"] = node.feature;
        jn["threshold"] = dtos(node.threshold);
        jn["left"] = node.left;
        jn["right"] = node.right;
        jn["p"] = dtos(node.p);
        nodes.push_back(std::move(jn));
    }
    ordered_json j;
    j["nodes"] = std::move(nodes);
    return j;
}

TreeModel tree_from_json(const ordered_json& j) {
    TreeModel tree;
    for (const auto& jn : j.at("nodes")) {
        TreeNode node;
        node.feature = jn.at("feature").get<int>();
        node.threshold = stod_exact(jn.at("threshold").get<std::string>());
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
        node.p = stod_exact(jn.at("p").get<std::string>());
        tree.nodes.push_back(node);
    }
    return tree;
}

ordered_json state_to_json(const PredictorState& state) {
    return std::visit(
        [](const auto& model) -> ordered_json {
            using T = std::decay_t<decltype(model)>;
            ordered_json j;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                j["p"] = dtos(model.p);
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                j["weights"] = doubles_to_json(model.weights);
                j["intercept"] = dtos(model.intercept);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                j = tree_to_json(model);
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                j["prior_pos"] = dtos(model.prior_pos);
                j["degenerate"] = model.degenerate;
                j["mean"] = ordered_json::array({doubles_to_json(model.mean[0]),
                                                 doubles_to_json(model.mean[1])});
                j["var"] = ordered_json::array({doubles_to_json(model.var[0]),
                                                doubles_to_json(model.var[1])});
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                j["k"] = model.k;
                j["mean"] = doubles_to_json(model.mean);
                j["inv_sd"] = doubles_to_json(model.inv_sd);
                ordered_json pts = ordered_json::array();
                for (const auto& p : model.points) pts.push_back(doubles_to_json(p));
                j["points"] = std::move(pts);
                j["labels"] = model.labels;
            } else if constexpr (std::is_same_v<T, LassoModel>) {
                j["weights"] = doubles_to_json(model.weights);
                j["intercept"] = dtos(model.intercept);
                j["lambda"] = dtos(model.lambda);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                ordered_json trees = ordered_json::array();
                for (const auto& tree : model.trees) trees.push_back(tree_to_json(tree));
                j["trees"] = std::move(trees);
            } else { // AdaBoostModel
                ordered_json stumps = ordered_json::array();
                for (const auto& s : model.stumps) {
                    ordered_json js;
                    js["feature"] = s.feature;
                    js["threshold"] = dtos(s.threshold);
                    js["polarity"] = s.polarity;
                    stumps.push_back(std::move(js));
                }
                j["stumps"] = std::move(stumps);
                j["alphas"] = doubles_to_json(model.alphas);
            }
            return j;
        },
        state);
}

PredictorState state_from_json(LearnerId id, const ordered_json& j) {
    switch (id) {
        case LearnerId::constant:
            return ConstantModel{stod_exact(j.at("p").get<std::string>())};
        case LearnerId::logistic:
            return LogisticModel{doubles_from_json(j.at("weights")),
                                 stod_exact(j.at("intercept").get<std::string>())};
        case LearnerId::tree:
            return tree_from_json(j);
        case LearnerId::naive_bayes: {
            NaiveBayesModel model;
            model.prior_pos = stod_exact(j.at("prior_pos").get<std::string>());
            model.degenerate = j.at("degenerate").get<bool>();
            model.mean = {doubles_from_json(j.at("mean").at(0)),
                          doubles_from_json(j.at("mean").at(1))};
            model.var = {doubles_from_json(j.at("var").at(0)),
                         doubles_from_json(j.at("var").at(1))};
            return model;
        }
        case LearnerId::knn: {
            KnnModel model;
            model.k = j.at("k").get<int>();
            model.mean = doubles_from_json(j.at("mean"));
            model.inv_sd = doubles_from_json(j.at("inv_sd"));
            for (const auto& p : j.at("points")) model.points.push_back(doubles_from_json(p));
            model.labels = j.at("labels").get<std::vector<int>>();
            return model;
        }
        case LearnerId::lasso_logistic:
            return LassoModel{doubles_from_json(j.at("weights")),
                              stod_exact(j.at("intercept").get<std::string>()),
                              stod_exact(j.at("lambda").get<std::string>())};
        case LearnerId::random_forest: {
            ForestModel model;
            for (const auto& jt : j.at("trees")) model.trees.push_back(tree_from_json(jt));
            return model;
        }
        case LearnerId::adaboost: {
            AdaBoostModel model;
            for (const auto& js : j.at("stumps"))
                model.stumps.push_back({js.at("feature").get<int>(),
                                        stod_exact(js.at("threshold").get<std::string>()),
                                        js.at("polarity").get<int>()});
            model.alphas = doubles_from_json(j.at("alphas"));
            return model;
        }
    }
    throw IoError("unknown learner id in model file");
}

ordered_json cell_to_json(const TrainedCell& cell) {
    ordered_json bounds = ordered_json::array();
    for (const auto& iv : cell.cell.bounds) {
        ordered_json jb;
        jb["lo"] = dtos(iv.lo);
        jb["hi"] = dtos(iv.hi);
        bounds.push_back(std::move(jb));
    }
    ordered_json j;
    j["bounds"] = std::move(bounds);
    j["pool_index"] = cell.pool_index;
    j["train_count"] = cell.train_count;
    j["validation_count"] = cell.validation_count;
    j["validation_loss_sum"] = dtos(cell.validation_loss_sum);
    j["learner"] = spec_to_json(cell.predictor.spec);
    j["state"] = state_to_json(cell.predictor.state);
    return j;
}

TrainedCell cell_from_json(const ordered_json& j) {
    TrainedCell cell;
    for (const auto& jb : j.at("bounds"))
        cell.cell.bounds.push_back(Interval{stod_exact(jb.at("lo").get<std::string>()),
                                            stod_exact(jb.at("hi").get<std::string>())});
    cell.pool_index = j.at("pool_index").get<int>();
    cell.train_count = j.at("train_count").get<int>();
    cell.validation_count = j.at("validation_count").get<int>();
    cell.validation_loss_sum = stod_exact(j.at("validation_loss_sum").get<std::string>());
    cell.predictor.spec = spec_from_json(j.at("learner"));
    cell.predictor.state = state_from_json(cell.predictor.spec.id, j.at("state"));
    return cell;
}

} // namespace

std::string model_to_json(const PartitionModel& model) {
    ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["library_version"] = kLibraryVersion;
    j["seed"] = model.seed;
    j["objective"] = dtos(model.objective);
    j["schema"] = schema_to_json(model.schema);
    j["config"] = config_to_json(model.config);
    ordered_json pool = ordered_json::array();
    for (const auto& spec : model.pool) pool.push_back(spec_to_json(spec));
    j["pool"] = std::move(pool);
    ordered_json cells = ordered_json::array();
    for (const auto& cell : model.cells) cells.push_back(cell_to_json(cell));
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

PartitionModel model_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw IoError("unsupported model format_version " + std::to_string(version) +
                          " (expected " + std::to_string(kModelFormatVersion) + ")");
        PartitionModel model;
        model.seed = j.at("seed").get<uint64_t>();
        model.objective = stod_exact(j.at("objective").get<std::string>());
        model.schema = schema_from_json(j.at("schema"));
        model.config = config_from_json(j.at("config"));
        for (const auto& js : j.at("pool")) model.pool.push_back(spec_from_json(js));
        for (const auto& jc : j.at("cells")) model.cells.push_back(cell_from_json(jc));
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("model file is missing required fields: ") + e.what());
    }
}

void save_model(const PartitionModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << model_to_json(model);
    if (!out) throw IoError("failed writing model to: " + path);
}

PartitionModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace cellfit
