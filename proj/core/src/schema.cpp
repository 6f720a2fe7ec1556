#include "cellfit/schema.hpp"

#include <stdexcept>
#include <unordered_set>

namespace cellfit {

std::string to_string(FeatureKind kind) {
    return kind == FeatureKind::numeric ? "numeric" : "categorical";
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "numeric") return FeatureKind::numeric;
    if (s == "categorical") return FeatureKind::categorical;
    throw std::invalid_argument("unknown feature kind: " + s);
}

void FeatureSchema::validate() const {
    if (features.empty()) throw std::invalid_argument("schema has no features");
    std::unordered_set<std::string> seen;
    for (const auto& f : features) {
        if (f.name.empty()) throw std::invalid_argument("feature with empty name");
        if (!seen.insert(f.name).second)
            throw std::invalid_argument("duplicate feature name: " + f.name);
        if (f.kind == FeatureKind::categorical && f.categories.empty())
            throw std::invalid_argument("categorical feature without categories: " + f.name);
        if (f.kind == FeatureKind::numeric && !f.categories.empty())
            throw std::invalid_argument("numeric feature carries categories: " + f.name);
        if (!(f.sd > 0.0))
            throw std::invalid_argument("non-positive standardization sd on: " + f.name);
    }
    if (seen.count(label_name))
        throw std::invalid_argument("label column duplicates a feature name: " + label_name);
}

int FeatureSchema::feature_index(const std::string& name) const {
    for (int i = 0; i < dimension(); ++i)
        if (features[static_cast<size_t>(i)].name == name) return i;
    return -1;
}

} // namespace cellfit
