// Command-line front end: synth | prep | train | predict | evaluate |
// benchmark | tradeoff | match. Exit codes: 0 ok, 1 unexpected error,
// 2 I/O or data error, 3 invalid configuration, 4 training failure.
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cellfit/cfs.hpp"
#include "cellfit/config.hpp"
#include "cellfit/csv.hpp"
#include "cellfit/encode.hpp"
#include "cellfit/errors.hpp"
#include "cellfit/evalbench.hpp"
#include "cellfit/impute.hpp"
#include "cellfit/matching.hpp"
#include "cellfit/model_io.hpp"
#include "cellfit/partitioner.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/splits.hpp"
#include "cellfit/synth.hpp"
#include "cellfit/version.hpp"

namespace {

using cellfit::ConfigError;
using cellfit::IoError;
using cellfit::TrainError;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("failed writing: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<cellfit::LearnerSpec> pool_from_names(const std::string& csv_names) {
    std::vector<cellfit::LearnerSpec> pool;
    std::stringstream ss(csv_names);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        try {
            pool.push_back(cellfit::LearnerSpec::make(cellfit::learner_id_from_string(name)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (pool.empty()) throw ConfigError("pool must name at least one learner");
    return pool;
}

// Run configuration file: a flat JSON object mirroring the training knobs.
// Unknown keys are rejected so typos fail loudly instead of silently using
// defaults.
void apply_config_file(const std::string& path, cellfit::FitConfig* config,
                       std::vector<cellfit::LearnerSpec>* pool) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "gamma") config->gamma = value.get<int>();
            else if (key == "alpha") config->alpha = value.get<double>();
            else if (key == "delta") config->delta = value.get<double>();
            else if (key == "k_assumed") config->k_assumed = value.get<int>();
            else if (key == "loss") config->loss = cellfit::loss_kind_from_string(value.get<std::string>());
            else if (key == "s_min") config->s_min = value.get<int>();
            else if (key == "v_min") config->v_min = value.get<int>();
            else if (key == "validation_fraction") config->validation_fraction = value.get<double>();
            else if (key == "seed") config->seed = value.get<uint64_t>();
            else if (key == "max_leaves") config->max_leaves = value.get<int>();
            else if (key == "max_cuts_per_dim") config->max_cuts_per_dim = value.get<int>();
            else if (key == "improvement_tol") config->improvement_tol = value.get<double>();
            else if (key == "threads") config->threads = value.get<int>();
            else if (key == "pool") {
                pool->clear();
                for (const auto& name : value)
                    pool->push_back(cellfit::LearnerSpec::make(
                        cellfit::learner_id_from_string(name.get<std::string>())));
            } else {
                throw ConfigError("unknown config key: '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value in config file: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<double> parse_levels(const std::string& csv_levels) {
    std::vector<double> levels;
    std::stringstream ss(csv_levels);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            levels.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse confidence level: '" + item + "'");
        }
    }
    if (levels.empty()) throw ConfigError("no confidence levels given");
    return levels;
}

std::vector<int> parse_int_list(const std::string& csv_ints, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv_ints);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError(std::string("cannot parse ") + what + ": '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
    return out;
}

cellfit::Dataset load_dataset(const std::string& path, const std::string& label) {
    const cellfit::RawTable table = cellfit::read_csv(path);
    const cellfit::FeatureSchema schema = cellfit::infer_schema(table, label);
    return cellfit::encode_table(table, schema);
}

cellfit::Dataset load_dataset_with_schema(const std::string& path,
                                          const cellfit::FeatureSchema& schema) {
    const cellfit::RawTable table = cellfit::read_csv(path);
    cellfit::Dataset data = cellfit::encode_table(table, schema);
    cellfit::standardize_apply(data, schema);
    return data;
}

cellfit::RawTable dataset_to_table(const cellfit::Dataset& data) {
    cellfit::RawTable table;
    for (const auto& f : data.schema.features) table.columns.push_back(f.name);
    table.columns.push_back(data.schema.label_name);
    for (const auto& inst : data.instances) {
        std::vector<std::string> row;
        row.reserve(inst.x.size() + 1);
        for (size_t j = 0; j < inst.x.size(); ++j) {
            if (std::isnan(inst.x[j])) {
                row.emplace_back(); // empty cell = missing
                continue;
            }
            const auto& spec = data.schema.features[j];
            if (spec.kind == cellfit::FeatureKind::categorical && !spec.standardized) {
                const auto code = static_cast<size_t>(inst.x[j]);
                row.push_back(code < spec.categories.size() ? spec.categories[code]
                                                            : "__unseen__");
            } else {
                row.push_back(format_double(inst.x[j]));
            }
        }
        row.push_back(std::to_string(inst.y));
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---- subcommand payloads ----

struct CommonTrainArgs {
    std::string input;
    std::string label = "label";
    std::string config_path;
    std::string pool_names;
    cellfit::FitConfig config;
    // flag-presence markers so explicit flags override the config file
    CLI::Option* opt_gamma = nullptr;
    CLI::Option* opt_alpha = nullptr;
    CLI::Option* opt_delta = nullptr;
    CLI::Option* opt_loss = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_threads = nullptr;
    CLI::Option* opt_max_leaves = nullptr;
    CLI::Option* opt_smin = nullptr;
    CLI::Option* opt_vmin = nullptr;
    double flag_alpha = 1.0;
    double flag_delta = 0.0;
    int flag_gamma = 2;
    std::string flag_loss = "zero_one";
    uint64_t flag_seed = 0;
    int flag_threads = 1;
    int flag_max_leaves = 0;
    int flag_smin = 50;
    int flag_vmin = 25;
};

void add_train_flags(CLI::App* cmd, CommonTrainArgs* args) {
    cmd->add_option("--input", args->input, "training CSV")->required();
    cmd->add_option("--label", args->label, "label column name");
    cmd->add_option("--config", args->config_path, "JSON run configuration");
    cmd->add_option("--pool", args->pool_names, "comma-separated learner pool");
    args->opt_gamma = cmd->add_option("--gamma", args->flag_gamma, "parts per refinement (2 or 3)");
    args->opt_alpha = cmd->add_option("--alpha", args->flag_alpha, "complexity penalty weight");
    args->opt_delta = cmd->add_option("--delta", args->flag_delta, "coverage target; derives alpha");
    args->opt_loss = cmd->add_option("--loss", args->flag_loss, "zero_one | log_loss | brier");
    args->opt_seed = cmd->add_option("--seed", args->flag_seed, "root RNG seed");
    args->opt_threads = cmd->add_option("--threads", args->flag_threads, "worker threads");
    args->opt_max_leaves = cmd->add_option("--max-leaves", args->flag_max_leaves, "leaf cap");
    args->opt_smin = cmd->add_option("--s-min", args->flag_smin, "min training rows per cell");
    args->opt_vmin = cmd->add_option("--v-min", args->flag_vmin, "min validation rows per cell");
}

std::pair<cellfit::FitConfig, std::vector<cellfit::LearnerSpec>>
resolve_train_config(const CommonTrainArgs& args) {
    cellfit::FitConfig config = args.config;
    std::vector<cellfit::LearnerSpec> pool = cellfit::default_pool();
    if (!args.config_path.empty()) apply_config_file(args.config_path, &config, &pool);
    if (!args.pool_names.empty()) pool = pool_from_names(args.pool_names);
    if (args.opt_gamma->count()) config.gamma = args.flag_gamma;
    if (args.opt_alpha->count()) config.alpha = args.flag_alpha;
    if (args.opt_delta->count()) config.delta = args.flag_delta;
    if (args.opt_loss->count()) {
        try {
            config.loss = cellfit::loss_kind_from_string(args.flag_loss);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (args.opt_seed->count()) config.seed = args.flag_seed;
    if (args.opt_threads->count()) config.threads = args.flag_threads;
    if (args.opt_max_leaves->count()) config.max_leaves = args.flag_max_leaves;
    if (args.opt_smin->count()) config.s_min = args.flag_smin;
    if (args.opt_vmin->count()) config.v_min = args.flag_vmin;
    config.M = static_cast<int>(pool.size());
    config.validate();
    return {config, pool};
}

// One JSON object per line so long traces stream through line-oriented tools.
std::string trace_to_jsonl(const std::vector<cellfit::RefineStep>& trace) {
    std::string out;
    for (const auto& step : trace) {
        ordered_json js;
        js["cell"] = step.cell_index;
        js["candidates"] = step.candidates;
        js["action"] = step.split ? "split" : "keep";
        js["objective_before"] = format_double(step.objective_before);
        js["objective_after"] = format_double(step.objective_after);
        ordered_json children = ordered_json::array();
        for (const auto& cube : step.children) {
            ordered_json bounds = ordered_json::array();
            for (const auto& iv : cube.bounds) {
                ordered_json jb;
                jb["lo"] = format_double(iv.lo);
                jb["hi"] = format_double(iv.hi);
                bounds.push_back(std::move(jb));
            }
            children.push_back(std::move(bounds));
        }
        js["children"] = std::move(children);
        out += js.dump();
        out += '\n';
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"hypercube-partitioned ensemble trainer"};
    app.set_version_flag("--version", std::string(cellfit::kLibraryVersion));
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "sample a synthetic dataset to CSV");
    std::string synth_preset = "checkerboard", synth_out;
    int synth_n = 1000;
    uint64_t synth_seed = 0;
    double synth_missing = -1.0;
    synth->add_option("--preset", synth_preset, "xor | checkerboard | three_segments");
    synth->add_option("--n", synth_n, "rows to sample")->required();
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--missing-rate", synth_missing, "per-entry missingness probability");
    synth->add_option("--out", synth_out, "output CSV")->required();

    // ---- prep ----
    auto* prep = app.add_subcommand("prep", "impute / select / standardize a CSV");
    std::string prep_in, prep_out, prep_label = "label", prep_impute = "none";
    std::string prep_report, prep_delim = ",";
    bool prep_cfs = false, prep_standardize = false;
    int prep_knn_k = 10;
    double prep_missing_threshold = 0.10;
    prep->add_option("--input", prep_in, "input CSV")->required();
    prep->add_option("--out", prep_out, "output CSV")->required();
    prep->add_option("--label", prep_label, "label column name");
    prep->add_option("--delimiter", prep_delim, "input field delimiter (single character)");
    prep->add_option("--missing-threshold", prep_missing_threshold,
                     "drop feature columns whose missing fraction reaches this");
    prep->add_option("--report", prep_report, "write dropped/kept column report JSON here");
    prep->add_option("--impute", prep_impute, "none | mean | knn");
    prep->add_option("--knn-k", prep_knn_k, "neighbours for knn imputation");
    prep->add_flag("--cfs", prep_cfs, "correlation-based feature selection");
    prep->add_flag("--standardize", prep_standardize, "z-score numeric features");

    // ---- train ----
    auto* train = app.add_subcommand("train", "fit a partitioned model");
    CommonTrainArgs train_args;
    std::string train_out, train_trace;
    add_train_flags(train, &train_args);
    train->add_option("--out", train_out, "model JSON path")->required();
    train->add_option("--trace", train_trace, "write refinement trace JSON here");

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "score rows with a trained model");
    std::string pred_model, pred_in, pred_out;
    predict->add_option("--model", pred_model, "model JSON")->required();
    predict->add_option("--input", pred_in, "input CSV")->required();
    predict->add_option("--out", pred_out, "output CSV")->required();

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "score a model on labelled data");
    std::string eval_model, eval_in, eval_out, eval_features;
    std::string eval_levels = "0.8,0.85,0.9,0.95";
    evaluate->add_option("--model", eval_model, "model JSON")->required();
    evaluate->add_option("--input", eval_in, "labelled CSV")->required();
    evaluate->add_option("--out", eval_out, "write JSON report here (text goes to stdout)");
    evaluate->add_option("--confidence-levels", eval_levels,
                         "comma-separated thresholds for the confidence table");
    evaluate->add_option("--features", eval_features,
                         "write a per-cell feature relevance report here (.json for JSON)");

    // ---- benchmark ----
    auto* benchmark = app.add_subcommand("benchmark", "compare against baseline learners");
    CommonTrainArgs bench_args;
    std::string bench_test, bench_out, bench_levels = "0.8,0.85,0.9,0.95";
    add_train_flags(benchmark, &bench_args);
    benchmark->add_option("--test", bench_test, "held-out labelled CSV")->required();
    benchmark->add_option("--confidence-levels", bench_levels, "comma-separated thresholds");
    benchmark->add_option("--out", bench_out, "write JSON report here (text goes to stdout)");

    // ---- tradeoff ----
    auto* tradeoff = app.add_subcommand("tradeoff", "sweep the leaf cap");
    CommonTrainArgs trade_args;
    std::string trade_test, trade_out, trade_leaves = "1,2,3,4,5,6,7,8";
    add_train_flags(tradeoff, &trade_args);
    tradeoff->add_option("--test", trade_test, "held-out labelled CSV")->required();
    tradeoff->add_option("--leaves", trade_leaves, "comma-separated leaf caps");
    tradeoff->add_option("--out", trade_out, "write JSON report here (text goes to stdout)");

    // ---- match ----
    auto* match = app.add_subcommand("match", "stable matching from a score matrix");
    std::string match_scores, match_out, match_capacity;
    match->add_option("--scores", match_scores, "CSV: recipient id + one column per donor")
        ->required();
    match->add_option("--capacity", match_capacity, "comma-separated donor capacities (default 1)");
    match->add_option("--out", match_out, "write matching JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }

    if (synth->parsed()) {
        cellfit::SynthSpec spec = cellfit::SynthSpec::named(synth_preset);
        if (synth_missing >= 0.0) spec.missing_rate = synth_missing;
        const cellfit::Dataset data = cellfit::sample(spec, synth_n, synth_seed);
        cellfit::write_csv(dataset_to_table(data), synth_out);
        std::cout << "wrote " << data.size() << " rows to " << synth_out << "\n";
        return 0;
    }

    if (prep->parsed()) {
        if (prep_delim.size() != 1 || prep_delim[0] == '"' || prep_delim[0] == '\n' ||
            prep_delim[0] == '\r')
            throw ConfigError("--delimiter must be a single character other than '\"', CR, LF");
        auto [data, load_report] =
            cellfit::load_csv(prep_in, prep_label, prep_missing_threshold, prep_delim[0]);
        for (const auto& col : load_report.dropped)
            std::cout << "dropped column '" << col.name << "' (missing fraction "
                      << format_double(col.missing_fraction) << ")\n";
        if (!prep_report.empty()) {
            ordered_json j;
            for (const char* key : {"dropped", "kept"}) {
                ordered_json arr = ordered_json::array();
                const auto& cols =
                    std::string(key) == "dropped" ? load_report.dropped : load_report.kept;
                for (const auto& col : cols) {
                    ordered_json jc;
                    jc["name"] = col.name;
                    jc["missing_fraction"] = format_double(col.missing_fraction);
                    arr.push_back(std::move(jc));
                }
                j[key] = std::move(arr);
            }
            write_text_file(prep_report, j.dump(2) + "\n");
        }
        if (prep_impute == "mean") {
            cellfit::mean_impute(data);
        } else if (prep_impute == "knn") {
            cellfit::knn_impute(data, prep_knn_k);
        } else if (prep_impute != "none") {
            throw ConfigError("unknown --impute mode: " + prep_impute);
        }
        if (prep_cfs) {
            const auto rows = cellfit::all_rows(data);
            const cellfit::CfsResult cfs = cellfit::cfs_select(data, rows);
            if (cfs.selected.empty())
                throw TrainError("feature selection kept nothing (no informative features)");
            std::vector<int> keep = cfs.selected;
            std::sort(keep.begin(), keep.end()); // preserve original column order
            data = cellfit::project_features(data, keep);
            std::cout << "kept " << keep.size() << " of " << cfs.path.size()
                      << " explored features\n";
        }
        if (prep_standardize) {
            const auto rows = cellfit::all_rows(data);
            cellfit::standardize_fit(data, rows);
        }
        cellfit::write_csv(dataset_to_table(data), prep_out);
        std::cout << "wrote " << data.size() << " rows to " << prep_out << "\n";
        return 0;
    }

    if (train->parsed()) {
        auto [config, pool] = resolve_train_config(train_args);
        const cellfit::Dataset data = load_dataset(train_args.input, train_args.label);
        if (train_trace.empty()) {
            const cellfit::PartitionModel model = cellfit::fit_model(data, pool, config);
            cellfit::save_model(model, train_out);
            std::cout << "trained " << model.cells.size() << " cells, objective "
                      << format_double(model.objective) << ", saved to " << train_out << "\n";
        } else {
            // mirror fit_model but keep the trace
            const cellfit::SplitIndices split = cellfit::stratified_split(
                data, config.validation_fraction,
                cellfit::derive_seed(config.seed, cellfit::SeedStream::split));
            if (static_cast<int>(pool.size()) != config.M)
                throw ConfigError("pool size does not match config.M");
            const cellfit::SearchResult result =
                cellfit::opt_partition(data, split.train, split.validation, pool, config);
            cellfit::save_model(result.model, train_out);
            write_text_file(train_trace, trace_to_jsonl(result.trace));
            std::cout << "trained " << result.model.cells.size() << " cells, objective "
                      << format_double(result.model.objective) << ", saved to " << train_out
                      << " (trace: " << train_trace << ")\n";
        }
        return 0;
    }

    if (predict->parsed()) {
        const cellfit::PartitionModel model = cellfit::load_model(pred_model);
        cellfit::RawTable table = cellfit::read_csv(pred_in);
        // tolerate unlabeled prediction inputs by synthesizing a zero label
        if (table.column_index(model.schema.label_name) < 0) {
            table.columns.push_back(model.schema.label_name);
            for (auto& row : table.rows) row.emplace_back("0");
        }
        cellfit::Dataset data = cellfit::encode_table(table, model.schema);
        cellfit::standardize_apply(data, model.schema);
        if (cellfit::has_missing(data))
            throw IoError("prediction input has missing values; run prep first");
        cellfit::RawTable out;
        out.columns = {"row", "proba", "class"};
        for (int i = 0; i < data.size(); ++i) {
            const double p = model.predict_proba(data.instances[static_cast<size_t>(i)].x);
            out.rows.push_back({std::to_string(i), format_double(p),
                                std::to_string(cellfit::predicted_class(p))});
        }
        cellfit::write_csv(out, pred_out);
        std::cout << "wrote " << out.rows.size() << " predictions to " << pred_out << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        const cellfit::PartitionModel model = cellfit::load_model(eval_model);
        cellfit::Dataset data = load_dataset_with_schema(eval_in, model.schema);
        if (cellfit::has_missing(data))
            throw IoError("evaluation input has missing values; run prep first");
        data.role = cellfit::DatasetRole::test;
        const cellfit::EvalReport report = cellfit::evaluate_model(model, data);
        std::cout << cellfit::report_to_text(report);
        if (!eval_levels.empty()) {
            const auto levels = parse_levels(eval_levels);
            const auto rows = cellfit::confidence_report(
                [&](std::span<const double> x) { return model.predict_proba(x); }, data, levels);
            std::cout << "level  selected  correct  realized\n";
            for (const auto& row : rows)
                std::cout << format_double(row.level) << "  " << row.selected << "  "
                          << row.correct << "  " << format_double(row.realized_rate) << "\n";
        }
        if (!eval_out.empty()) write_text_file(eval_out, cellfit::report_to_json(report));
        if (!eval_features.empty()) {
            const cellfit::FeatureReport features = cellfit::partition_feature_report(model, data);
            const bool as_json =
                eval_features.size() >= 5 && eval_features.rfind(".json") == eval_features.size() - 5;
            write_text_file(eval_features, as_json ? cellfit::report_to_json(features)
                                                   : cellfit::report_to_text(features));
        }
        return 0;
    }

    if (benchmark->parsed()) {
        auto [config, pool] = resolve_train_config(bench_args);
        const cellfit::Dataset train_data = load_dataset(bench_args.input, bench_args.label);
        const cellfit::RawTable test_table = cellfit::read_csv(bench_test);
        cellfit::Dataset test_data = cellfit::encode_table(test_table, train_data.schema);
        test_data.role = cellfit::DatasetRole::test;
        const auto levels = parse_levels(bench_levels);
        const cellfit::BenchmarkReport report = cellfit::run_benchmark(
            train_data, test_data, pool, cellfit::default_baselines(), config, levels);
        std::cout << cellfit::report_to_text(report);
        if (!bench_out.empty()) write_text_file(bench_out, cellfit::report_to_json(report));
        return 0;
    }

    if (tradeoff->parsed()) {
        auto [config, pool] = resolve_train_config(trade_args);
        const cellfit::Dataset train_data = load_dataset(trade_args.input, trade_args.label);
        const cellfit::RawTable test_table = cellfit::read_csv(trade_test);
        cellfit::Dataset test_data = cellfit::encode_table(test_table, train_data.schema);
        test_data.role = cellfit::DatasetRole::test;
        const auto caps = parse_int_list(trade_leaves, "leaf cap");
        const auto rows = cellfit::tradeoff_curve(train_data, test_data, pool, config, caps);
        std::cout << cellfit::report_to_text(rows);
        if (!trade_out.empty()) write_text_file(trade_out, cellfit::report_to_json(rows));
        return 0;
    }

    if (match->parsed()) {
        const cellfit::RawTable table = cellfit::read_csv(match_scores);
        const auto scores = cellfit::scores_from_table(table);
        std::vector<int> capacity(scores.front().size(), 1);
        if (!match_capacity.empty()) {
            const auto given = parse_int_list(match_capacity, "capacity");
            if (given.size() != capacity.size())
                throw ConfigError("capacity list length must equal donor count");
            capacity = given;
        }
        const cellfit::MatchResult result = cellfit::stable_match(scores, capacity);
        ordered_json j;
        ordered_json assignments = ordered_json::array();
        for (size_t r = 0; r < result.donor_of.size(); ++r) {
            if (result.donor_of[r] < 0) continue;
            ordered_json ja;
            ja["recipient"] = table.rows[r][0];
            ja["donor"] = table.columns[static_cast<size_t>(result.donor_of[r]) + 1];
            ja["score"] = format_double(scores[r][static_cast<size_t>(result.donor_of[r])]);
            assignments.push_back(std::move(ja));
        }
        j["assignments"] = std::move(assignments);
        ordered_json unmatched = ordered_json::array();
        for (size_t r = 0; r < result.donor_of.size(); ++r)
            if (result.donor_of[r] < 0) unmatched.push_back(table.rows[r][0]);
        j["unmatched"] = std::move(unmatched);
        j["total_score"] = format_double(result.total_score);
        j["stable"] = cellfit::is_stable(scores, capacity, result);
        const std::string text = j.dump(2) + "\n";
        if (match_out.empty()) {
            std::cout << text;
        } else {
            write_text_file(match_out, text);
            std::cout << "matched " << j["assignments"].size() << " of "
                      << result.donor_of.size() << " recipients, total score "
                      << format_double(result.total_score) << "\n";
        }
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TrainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
