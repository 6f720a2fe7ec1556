#include "cellfit/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "cellfit/cfs.hpp"
#include "cellfit/errors.hpp"
#include "cellfit/partitioner.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/splits.hpp"
#include "num_format.hpp"

namespace cellfit {
namespace {

using ordered_json = nlohmann::ordered_json;
using detail::dtos;
using detail::fixed6;

// report-table names for baseline learners
std::string method_name(LearnerId id) {
    switch (id) {
        case LearnerId::logistic: return "logit";
        case LearnerId::lasso_logistic: return "lasso";
        case LearnerId::tree: return "dtree";
        case LearnerId::random_forest: return "rforest";
        case LearnerId::adaboost: return "aboost";
        default: return to_string(id);
    }
}

struct LossTally {
    double zero_one = 0.0, log_loss = 0.0, brier = 0.0;
    int n = 0, correct = 0;

    void add(double p, int y) {
        zero_one += pointwise_loss(p, y, LossKind::zero_one);
        log_loss += pointwise_loss(p, y, LossKind::log_loss);
        brier += pointwise_loss(p, y, LossKind::brier);
        correct += predicted_class(p) == y ? 1 : 0;
        ++n;
    }
};

BenchmarkRow score_method(const std::string& name, const ProbaFn& proba, const Dataset& test,
                          std::span<const double> levels) {
    BenchmarkRow row;
    row.method = name;
    LossTally tally;
    for (const auto& inst : test.instances) tally.add(proba(inst.x), inst.y);
    if (tally.n > 0) {
        row.zero_one = tally.zero_one / tally.n;
        row.log_loss = tally.log_loss / tally.n;
        row.brier = tally.brier / tally.n;
        row.accuracy = static_cast<double>(tally.correct) / tally.n;
    }
    row.confidence = confidence_report(proba, test, levels);
    return row;
}

ordered_json confidence_to_json(const std::vector<ConfidenceRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j;
        j["level"] = dtos(row.level);
        j["selected"] = row.selected;
        j["correct"] = row.correct;
        j["realized_rate"] = dtos(row.realized_rate);
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace

EvalReport evaluate_model(const PartitionModel& model, const Dataset& test) {
    if (test.dimension() != model.dimension())
        throw std::invalid_argument("test dimension disagrees with model");
    EvalReport report;
    LossTally tally;
    std::vector<double> cell_loss(model.cells.size(), 0.0);
    std::vector<int> cell_n(model.cells.size(), 0);
    for (const auto& inst : test.instances) {
        const auto cell = static_cast<size_t>(model.locate(inst.x));
        const double p = model.cells[cell].predictor.predict_proba(inst.x);
        tally.add(p, inst.y);
        cell_loss[cell] += pointwise_loss(p, inst.y, model.config.loss);
        cell_n[cell] += 1;
    }
    report.n = tally.n;
    if (tally.n > 0) {
        report.zero_one = tally.zero_one / tally.n;
        report.log_loss = tally.log_loss / tally.n;
        report.brier = tally.brier / tally.n;
        report.accuracy = static_cast<double>(tally.correct) / tally.n;
    }
    for (size_t c = 0; c < model.cells.size(); ++c) {
        CellEvalRow row;
        row.cell_index = static_cast<int>(c);
        row.learner = to_string(model.cells[c].predictor.spec.id);
        row.train_count = model.cells[c].train_count;
        row.test_count = cell_n[c];
        row.mean_loss = cell_n[c] > 0 ? cell_loss[c] / cell_n[c] : 0.0;
        report.cells.push_back(std::move(row));
    }
    return report;
}

std::span<const double> default_confidence_levels() {
    static const double levels[] = {0.80, 0.85, 0.90, 0.95};
    return levels;
}

std::vector<ConfidenceRow> confidence_report(const ProbaFn& proba, const Dataset& data,
                                             std::span<const double> levels) {
    std::vector<double> probs;
    probs.reserve(data.instances.size());
    for (const auto& inst : data.instances) probs.push_back(proba(inst.x));

    std::vector<ConfidenceRow> rows;
    rows.reserve(levels.size());
    for (double level : levels) {
        ConfidenceRow row;
        row.level = level;
        for (size_t i = 0; i < probs.size(); ++i) {
            // confident in either class: the predicted class's probability
            // must clear the threshold
            if (std::max(probs[i], 1.0 - probs[i]) < level) continue;
            row.selected += 1;
            if (predicted_class(probs[i]) == data.instances[i].y) row.correct += 1;
        }
        row.realized_rate =
            row.selected > 0 ? static_cast<double>(row.correct) / row.selected : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string dataset_fingerprint(const Dataset& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* bytes, size_t len) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& f : data.schema.features) mix(f.name.data(), f.name.size());
    for (const auto& inst : data.instances) {
        mix(inst.x.data(), inst.x.size() * sizeof(double));
        mix(&inst.y, sizeof(inst.y));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int confident_count(const BenchmarkRow& row, double level) {
    for (const auto& c : row.confidence)
        if (c.level == level) return c.selected;
    return 0;
}

int gain(const BenchmarkReport& report, double level) {
    if (report.rows.empty()) return 0;
    int best_baseline = 0;
    for (size_t r = 1; r < report.rows.size(); ++r)
        best_baseline = std::max(best_baseline, confident_count(report.rows[r], level));
    return confident_count(report.rows[0], level) - best_baseline;
}

BenchmarkReport run_benchmark(const Dataset& train, const Dataset& test,
                              const std::vector<LearnerSpec>& pool,
                              const std::vector<LearnerSpec>& baselines, const FitConfig& config,
                              std::span<const double> levels) {
    BenchmarkReport report;
    report.levels.assign(levels.begin(), levels.end());
    report.seed = config.seed;
    report.loss = to_string(config.loss);
    report.alpha = config.resolved_alpha();
    report.gamma = config.gamma;
    report.n_train = train.size();
    report.n_test = test.size();
    report.train_fingerprint = dataset_fingerprint(train);
    report.test_fingerprint = dataset_fingerprint(test);

    const PartitionModel model = fit_model(train, pool, config);
    report.rows.push_back(score_method(
        "cellfit", [&](std::span<const double> x) { return model.predict_proba(x); }, test,
        levels));

    // Baselines see exactly the rows the partition search trained on — its
    // validation rows stay held out — so the comparison is data-for-data fair.
    const SplitIndices split = stratified_split(train, config.validation_fraction,
                                                derive_seed(config.seed, SeedStream::split));
    for (size_t b = 0; b < baselines.size(); ++b) {
        const std::string name = method_name(baselines[b].id);
        try {
            const TrainedPredictor fitted =
                fit(baselines[b], train, split.train,
                    derive_seed(config.seed, SeedStream::report, b));
            report.rows.push_back(score_method(
                name, [&](std::span<const double> x) { return fitted.predict_proba(x); }, test,
                levels));
        } catch (const std::exception& e) {
            // one broken baseline must not void the rest of the comparison
            BenchmarkRow failed;
            failed.method = name;
            failed.error = e.what();
            report.rows.push_back(std::move(failed));
        }
    }
    return report;
}

std::vector<TradeoffRow> tradeoff_curve(const Dataset& train, const Dataset& test,
                                        const std::vector<LearnerSpec>& pool,
                                        const FitConfig& config, std::span<const int> leaf_caps) {
    std::vector<TradeoffRow> rows;
    rows.reserve(leaf_caps.size());
    for (int cap : leaf_caps) {
        FitConfig capped = config;
        capped.max_leaves = cap;
        const PartitionModel model = fit_model(train, pool, capped);

        TradeoffRow row;
        row.max_leaves = cap;
        row.cells = static_cast<int>(model.cells.size());
        row.objective = model.objective;
        double val_sum = 0.0;
        int val_n = 0;
        for (const auto& cell : model.cells) {
            val_sum += cell.validation_loss_sum;
            val_n += cell.validation_count;
        }
        row.validation_loss = val_n > 0 ? val_sum / val_n : 0.0;
        double test_sum = 0.0;
        for (const auto& inst : test.instances)
            test_sum += pointwise_loss(model.predict_proba(inst.x), inst.y, config.loss);
        row.test_loss = test.empty() ? 0.0 : test_sum / test.size();
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Path features keep their expansion order and subset merit; features the
// forward search never reached are appended by standalone merit.
std::vector<FeatureRank> rank_features(const Dataset& data, const RowIndex& rows, int top_k) {
    const CfsResult cfs = cfs_select(data, rows);
    std::vector<FeatureRank> out;
    std::vector<char> on_path(static_cast<size_t>(data.dimension()), 0);
    for (size_t i = 0; i < cfs.path.size(); ++i) {
        FeatureRank fr;
        fr.feature = cfs.path[i];
        fr.name = data.schema.features[static_cast<size_t>(fr.feature)].name;
        fr.merit = cfs.merits[i];
        fr.selected = i < cfs.selected.size();
        on_path[static_cast<size_t>(fr.feature)] = 1;
        out.push_back(std::move(fr));
    }
    std::vector<FeatureRank> rest;
    for (int f = 0; f < data.dimension(); ++f) {
        if (on_path[static_cast<size_t>(f)]) continue;
        FeatureRank fr;
        fr.feature = f;
        fr.name = data.schema.features[static_cast<size_t>(f)].name;
        const int single[] = {f};
        fr.merit = cfs_merit(data, rows, single);
        rest.push_back(std::move(fr));
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [](const FeatureRank& a, const FeatureRank& b) { return a.merit > b.merit; });
    out.insert(out.end(), rest.begin(), rest.end());
    if (static_cast<int>(out.size()) > top_k) out.resize(static_cast<size_t>(top_k));
    return out;
}

} // namespace

FeatureReport partition_feature_report(const PartitionModel& model, const Dataset& data,
                                       int top_k) {
    if (data.dimension() != model.dimension())
        throw std::invalid_argument("data dimension disagrees with model");
    if (top_k < 1) throw std::invalid_argument("top_k must be positive");

    FeatureReport report;
    report.top_k = top_k;
    report.global = rank_features(data, all_rows(data), top_k);

    std::vector<RowIndex> cell_rows(model.cells.size());
    for (int r = 0; r < data.size(); ++r)
        cell_rows[static_cast<size_t>(model.locate(data.instances[static_cast<size_t>(r)].x))]
            .push_back(r);

    for (size_t c = 0; c < model.cells.size(); ++c) {
        CellFeatureRanking row;
        row.cell_index = static_cast<int>(c);
        row.count = static_cast<int>(cell_rows[c].size());
        row.sufficient = row.count >= 10; // too few rows make correlations meaningless
        if (row.sufficient) row.ranking = rank_features(data, cell_rows[c], top_k);
        report.cells.push_back(std::move(row));
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    ordered_json j;
    j["n"] = report.n;
    j["zero_one"] = dtos(report.zero_one);
    j["log_loss"] = dtos(report.log_loss);
    j["brier"] = dtos(report.brier);
    j["accuracy"] = dtos(report.accuracy);
    ordered_json cells = ordered_json::array();
    for (const auto& row : report.cells) {
        ordered_json jc;
        jc["cell_index"] = row.cell_index;
        jc["learner"] = row.learner;
        jc["train_count"] = row.train_count;
        jc["test_count"] = row.test_count;
        jc["mean_loss"] = dtos(row.mean_loss);
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

std::string report_to_json(const BenchmarkReport& report) {
    ordered_json j;
    j["seed"] = report.seed;
    j["loss"] = report.loss;
    j["gamma"] = report.gamma;
    j["alpha"] = dtos(report.alpha);
    j["n_train"] = report.n_train;
    j["n_test"] = report.n_test;
    j["train_fingerprint"] = report.train_fingerprint;
    j["test_fingerprint"] = report.test_fingerprint;
    ordered_json levels = ordered_json::array();
    for (double level : report.levels) levels.push_back(dtos(level));
    j["levels"] = std::move(levels);
    ordered_json gains = ordered_json::array();
    for (double level : report.levels) gains.push_back(gain(report, level));
    j["gains"] = std::move(gains);
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json jr;
        jr["method"] = row.method;
        if (!row.error.empty()) {
            jr["error"] = row.error;
            rows.push_back(std::move(jr));
            continue;
        }
        jr["zero_one"] = dtos(row.zero_one);
        jr["log_loss"] = dtos(row.log_loss);
        jr["brier"] = dtos(row.brier);
        jr["accuracy"] = dtos(row.accuracy);
        jr["confidence"] = confidence_to_json(row.confidence);
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string report_to_json(std::span<const TradeoffRow> rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json jr;
        jr["max_leaves"] = row.max_leaves;
        jr["cells"] = row.cells;
        jr["objective"] = dtos(row.objective);
        jr["validation_loss"] = dtos(row.validation_loss);
        jr["test_loss"] = dtos(row.test_loss);
        arr.push_back(std::move(jr));
    }
    ordered_json j;
    j["rows"] = std::move(arr);
    return j.dump(2) + "\n";
}

namespace {

void append_table(std::string& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += "  ";
            out += row[c];
            if (c + 1 < row.size()) out.append(width[c] - row[c].size(), ' ');
        }
        out += "\n";
    }
}

} // namespace

std::string report_to_text(const EvalReport& report) {
    std::string out = "n=" + std::to_string(report.n) + " zero_one=" + fixed6(report.zero_one) +
                      " log_loss=" + fixed6(report.log_loss) + " brier=" + fixed6(report.brier) +
                      " accuracy=" + fixed6(report.accuracy) + "\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"cell", "learner", "train", "test", "mean_loss"});
    for (const auto& row : report.cells)
        rows.push_back({std::to_string(row.cell_index), row.learner,
                        std::to_string(row.train_count), std::to_string(row.test_count),
                        fixed6(row.mean_loss)});
    append_table(out, rows);
    return out;
}

std::string report_to_text(const BenchmarkReport& report) {
    std::string out;
    out += "# seed=" + std::to_string(report.seed) + "\n";
    out += "# loss=" + report.loss + " gamma=" + std::to_string(report.gamma) +
           " alpha=" + fixed6(report.alpha) + "\n";
    out += "# n_train=" + std::to_string(report.n_train) +
           " n_test=" + std::to_string(report.n_test) + "\n";
    out += "# train_fingerprint=" + report.train_fingerprint +
           " test_fingerprint=" + report.test_fingerprint + "\n";
    out += "# methods=";
    for (size_t r = 0; r < report.rows.size(); ++r) {
        if (r) out += ",";
        out += report.rows[r].method;
    }
    out += "\n";

    if (!report.levels.empty()) {
        // thresholds down the side, one column per algorithm, gain vs the
        // best baseline on the right
        out += "== confident counts ==\n";
        std::vector<std::vector<std::string>> counts;
        std::vector<std::string> header{"level"};
        for (const auto& row : report.rows) header.push_back(row.method);
        header.push_back("gain");
        counts.push_back(std::move(header));
        for (double level : report.levels) {
            std::vector<std::string> line{fixed6(level)};
            for (const auto& row : report.rows)
                line.push_back(std::to_string(confident_count(row, level)));
            line.push_back(std::to_string(gain(report, level)));
            counts.push_back(std::move(line));
        }
        append_table(out, counts);

        out += "== accuracy among confident ==\n";
        std::vector<std::vector<std::string>> acc;
        std::vector<std::string> header2{"level"};
        for (const auto& row : report.rows) header2.push_back(row.method);
        acc.push_back(std::move(header2));
        for (size_t l = 0; l < report.levels.size(); ++l) {
            std::vector<std::string> line{fixed6(report.levels[l])};
            for (const auto& row : report.rows)
                line.push_back(l < row.confidence.size() ? fixed6(row.confidence[l].realized_rate)
                                                         : std::string("-"));
            acc.push_back(std::move(line));
        }
        append_table(out, acc);
    }

    out += "== losses ==\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"method", "zero_one", "log_loss", "brier", "accuracy"});
    for (const auto& row : report.rows)
        rows.push_back({row.method, fixed6(row.zero_one), fixed6(row.log_loss),
                        fixed6(row.brier), fixed6(row.accuracy)});
    append_table(out, rows);
    for (const auto& row : report.rows)
        if (!row.error.empty()) out += "# failed method=" + row.method + " error=" + row.error + "\n";
    return out;
}

std::string report_to_text(std::span<const TradeoffRow> rows) {
    std::string out;
    std::vector<std::vector<std::string>> table;
    table.push_back({"max_leaves", "cells", "objective", "validation_loss", "test_loss"});
    for (const auto& row : rows)
        table.push_back({std::to_string(row.max_leaves), std::to_string(row.cells),
                         fixed6(row.objective), fixed6(row.validation_loss),
                         fixed6(row.test_loss)});
    append_table(out, table);
    return out;
}

std::string report_to_json(const FeatureReport& report) {
    auto ranks_to_json = [](const std::vector<FeatureRank>& ranking) {
        ordered_json arr = ordered_json::array();
        for (const auto& fr : ranking) {
            ordered_json j;
            j["feature"] = fr.feature;
            j["name"] = fr.name;
            j["merit"] = dtos(fr.merit);
            j["selected"] = fr.selected;
            arr.push_back(std::move(j));
        }
        return arr;
    };
    ordered_json j;
    j["top_k"] = report.top_k;
    j["global"] = ranks_to_json(report.global);
    ordered_json cells = ordered_json::array();
    for (const auto& cell : report.cells) {
        ordered_json jc;
        jc["cell_index"] = cell.cell_index;
        jc["count"] = cell.count;
        jc["sufficient"] = cell.sufficient;
        jc["ranking"] = ranks_to_json(cell.ranking);
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

std::string report_to_text(const FeatureReport& report) {
    // one column per scope (global first), feature names down the ranks
    std::string out = "== feature relevance (top " + std::to_string(report.top_k) + ") ==\n";
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"rank", "global"};
    for (const auto& cell : report.cells)
        header.push_back("cell" + std::to_string(cell.cell_index) + "(n=" +
                         std::to_string(cell.count) + ")");
    table.push_back(std::move(header));

    size_t depth = report.global.size();
    for (const auto& cell : report.cells)
        depth = std::max(depth, cell.sufficient ? cell.ranking.size() : size_t{1});
    for (size_t r = 0; r < depth; ++r) {
        std::vector<std::string> line{std::to_string(r + 1)};
        line.push_back(r < report.global.size() ? report.global[r].name : "");
        for (const auto& cell : report.cells) {
            if (!cell.sufficient)
                line.push_back(r == 0 ? "(insufficient data)" : "");
            else
                line.push_back(r < cell.ranking.size() ? cell.ranking[r].name : "");
        }
        table.push_back(std::move(line));
    }
    append_table(out, table);
    return out;
}

} // namespace cellfit
