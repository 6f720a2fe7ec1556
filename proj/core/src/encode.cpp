#include "cellfit/encode.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cellfit/errors.hpp"

namespace cellfit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_double(const std::string& s, double* out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(*out);
}

int parse_label(const std::string& cell, size_t row) {
    if (cell == "0" || cell == "false") return 0;
    if (cell == "1" || cell == "true") return 1;
    throw IoError("row " + std::to_string(row) + ": label '" + cell + "' is not binary");
}

} // namespace

FeatureSchema infer_schema(const RawTable& table, const std::string& label_column) {
    const int label_idx = table.column_index(label_column);
    if (label_idx < 0) throw IoError("label column not found: " + label_column);

    FeatureSchema schema;
    schema.label_name = label_column;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (static_cast<int>(j) == label_idx) continue;
        FeatureSpec f;
        f.name = table.columns[j];
        bool numeric = true;
        bool any_observed = false;
        for (const auto& row : table.rows) {
            const auto& cell = row[j];
            if (is_missing_token(cell)) continue;
            any_observed = true;
            double v;
            if (!parse_double(cell, &v)) {
                numeric = false;
                break;
            }
        }
        if (!any_observed) numeric = true; // all-missing column stays numeric (NaN)
        if (numeric) {
            f.kind = FeatureKind::numeric;
        } else {
            f.kind = FeatureKind::categorical;
            // codes by first appearance so re-encoding the same file is stable
            std::unordered_map<std::string, int> seen;
            for (const auto& row : table.rows) {
                const auto& cell = row[j];
                if (is_missing_token(cell)) continue;
                if (seen.emplace(cell, static_cast<int>(f.categories.size())).second)
                    f.categories.push_back(cell);
            }
        }
        schema.features.push_back(std::move(f));
    }
    schema.validate();
    return schema;
}

std::pair<Dataset, LoadReport> load_csv(const std::string& path, const std::string& label_column,
                                        double missing_threshold, char delim) {
    return load_table(read_csv(path, delim), label_column, missing_threshold);
}

std::pair<Dataset, LoadReport> load_table(const RawTable& table, const std::string& label_column,
                                          double missing_threshold) {
    const int label_idx = table.column_index(label_column);
    if (label_idx < 0) throw IoError("label column not found: " + label_column);

    LoadReport report;
    RawTable reduced;
    std::vector<size_t> keep;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (static_cast<int>(j) == label_idx) {
            keep.push_back(j);
            continue;
        }
        size_t missing = 0;
        for (const auto& row : table.rows)
            if (is_missing_token(row[j])) ++missing;
        ColumnReport col;
        col.name = table.columns[j];
        col.missing_fraction =
            table.rows.empty() ? 0.0 : static_cast<double>(missing) / table.rows.size();
        if (col.missing_fraction >= missing_threshold) {
            report.dropped.push_back(std::move(col));
        } else {
            report.kept.push_back(std::move(col));
            keep.push_back(j);
        }
    }

    reduced.columns.reserve(keep.size());
    for (size_t j : keep) reduced.columns.push_back(table.columns[j]);
    reduced.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::vector<std::string> out;
        out.reserve(keep.size());
        for (size_t j : keep) out.push_back(row[j]);
        reduced.rows.push_back(std::move(out));
    }

    const FeatureSchema schema = infer_schema(reduced, label_column);
    return {encode_table(reduced, schema), std::move(report)};
}

Dataset encode_table(const RawTable& table, const FeatureSchema& schema) {
    schema.validate();
    const int label_idx = table.column_index(schema.label_name);
    if (label_idx < 0) throw IoError("label column not found: " + schema.label_name);

    std::vector<int> col_of(schema.features.size());
    for (size_t f = 0; f < schema.features.size(); ++f) {
        const int idx = table.column_index(schema.features[f].name);
        if (idx < 0) throw IoError("feature column not found: " + schema.features[f].name);
        col_of[f] = idx;
    }

    Dataset data;
    data.schema = schema;
    data.instances.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        LabeledInstance inst;
        inst.y = parse_label(row[static_cast<size_t>(label_idx)], i);
        inst.x.resize(schema.features.size());
        for (size_t f = 0; f < schema.features.size(); ++f) {
            const auto& cell = row[static_cast<size_t>(col_of[f])];
            const auto& spec = schema.features[f];
            if (is_missing_token(cell)) {
                // categorical missing shares the unseen bucket; numeric is NaN
                inst.x[f] = spec.kind == FeatureKind::categorical
                                ? static_cast<double>(spec.categories.size())
                                : kNaN;
                continue;
            }
            if (spec.kind == FeatureKind::numeric) {
                double v;
                if (!parse_double(cell, &v))
                    throw IoError("row " + std::to_string(i) + ", column '" + spec.name +
                                  "': cannot parse '" + cell + "' as a number");
                inst.x[f] = v;
            } else {
                int code = static_cast<int>(spec.categories.size()); // unseen
                for (size_t c = 0; c < spec.categories.size(); ++c)
                    if (spec.categories[c] == cell) {
                        code = static_cast<int>(c);
                        break;
                    }
                inst.x[f] = static_cast<double>(code);
            }
        }
        data.instances.push_back(std::move(inst));
    }
    data.validate();
    return data;
}

void standardize_fit(Dataset& data, std::span<const int> rows) {
    for (size_t f = 0; f < data.schema.features.size(); ++f) {
        auto& spec = data.schema.features[f];
        if (spec.kind != FeatureKind::numeric) continue;
        double sum = 0.0;
        int n = 0;
        for (int r : rows) {
            const double v = data.instances[static_cast<size_t>(r)].x[f];
            if (std::isnan(v)) continue;
            sum += v;
            ++n;
        }
        const double mean = n > 0 ? sum / n : 0.0;
        double ss = 0.0;
        for (int r : rows) {
            const double v = data.instances[static_cast<size_t>(r)].x[f];
            if (std::isnan(v)) continue;
            ss += (v - mean) * (v - mean);
        }
        double sd = n > 0 ? std::sqrt(ss / n) : 1.0;
        if (!(sd > 0.0)) sd = 1.0; // constant columns pass through unscaled
        spec.mean = mean;
        spec.sd = sd;
        spec.standardized = true;
    }
    standardize_apply(data, data.schema);
}

void standardize_apply(Dataset& data, const FeatureSchema& fitted) {
    if (fitted.features.size() != data.schema.features.size())
        throw std::invalid_argument("standardization schema dimension mismatch");
    for (size_t f = 0; f < fitted.features.size(); ++f) {
        const auto& spec = fitted.features[f];
        if (!spec.standardized || spec.kind != FeatureKind::numeric) continue;
        for (auto& inst : data.instances) {
            if (std::isnan(inst.x[f])) continue;
            inst.x[f] = (inst.x[f] - spec.mean) / spec.sd;
        }
        data.schema.features[f].mean = spec.mean;
        data.schema.features[f].sd = spec.sd;
        data.schema.features[f].standardized = true;
    }
}

} // namespace cellfit
