#pragma once
#include <string>
#include <vector>

namespace cellfit {

enum class FeatureKind { numeric, categorical };

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

// One feature axis. Categorical values are stored as integer codes indexing
// into `categories`; anything unseen at apply time maps to categories.size().
// `mean`/`sd` are the train-side standardization statistics filled in by
// encoding; they default to the identity transform.
struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> categories; // non-empty iff categorical
    double mean = 0.0;
    double sd = 1.0;
    bool standardized = false;

    bool operator==(const FeatureSpec&) const = default;
};

struct FeatureSchema {
    std::vector<FeatureSpec> features;
    std::string label_name = "label";

    int dimension() const { return static_cast<int>(features.size()); }

    // throws std::invalid_argument on duplicate names, empty schema, or a
    // categorical feature without category codes
    void validate() const;

    int feature_index(const std::string& name) const; // -1 when absent

    bool operator==(const FeatureSchema&) const = default;
};

} // namespace cellfit
