#pragma once
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellfit/csv.hpp"
#include "cellfit/dataset.hpp"

namespace cellfit {

// Columns whose non-missing cells all parse as finite doubles become
// numeric; everything else becomes categorical with codes assigned by first
// appearance. The label column must hold 0/1 (or true/false) and no
// missing values.
FeatureSchema infer_schema(const RawTable& table, const std::string& label_column);

struct ColumnReport {
    std::string name;
    double missing_fraction = 0.0;
};

struct LoadReport {
    std::vector<ColumnReport> dropped; // columns excluded for excess missingness
    std::vector<ColumnReport> kept;
};

// One-call ingestion: parses the file, drops every feature column whose
// missing fraction is >= missing_threshold, infers the schema from the
// survivors, and encodes. The label column is exempt from dropping (a
// missing label is an error, not a gap).
std::pair<Dataset, LoadReport> load_csv(const std::string& path, const std::string& label_column,
                                        double missing_threshold = 0.10, char delim = ',');

// Same pipeline over an already parsed table.
std::pair<Dataset, LoadReport> load_table(const RawTable& table, const std::string& label_column,
                                          double missing_threshold = 0.10);

// Encodes rows against a schema. Missing cells become NaN (numeric) or the
// out-of-vocabulary code categories.size() (categorical, same code as an
// unseen category). Throws IoError on unparseable cells or missing columns.
Dataset encode_table(const RawTable& table, const FeatureSchema& schema);

// Fits mean/sd per numeric feature on the given rows (sd 0 -> 1 so constant
// columns pass through) and records them in the schema; NaNs are skipped.
void standardize_fit(Dataset& data, std::span<const int> rows);

// Applies a previously fitted standardization, e.g. to test data. No-op for
// features the schema does not mark standardized.
void standardize_apply(Dataset& data, const FeatureSchema& fitted);

} // namespace cellfit
