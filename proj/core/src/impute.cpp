#include "cellfit/impute.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "cellfit/errors.hpp"

namespace cellfit {
namespace {

bool missing(double v) { return std::isnan(v); }

double modal_code(const std::vector<double>& values) {
    std::map<int, int> counts; // ordered: lowest code wins ties
    for (double v : values) ++counts[static_cast<int>(v)];
    int best_code = 0, best_count = -1;
    for (const auto& [code, count] : counts)
        if (count > best_count) {
            best_count = count;
            best_code = code;
        }
    return static_cast<double>(best_code);
}

} // namespace

bool has_missing(const Dataset& data) {
    for (const auto& inst : data.instances)
        for (double v : inst.x)
            if (missing(v)) return true;
    return false;
}

std::vector<double> impute_fill_values(const Dataset& data) {
    const auto dim = static_cast<size_t>(data.dimension());
    std::vector<double> fills(dim, 0.0);
    for (size_t f = 0; f < dim; ++f) {
        std::vector<double> observed;
        for (const auto& inst : data.instances)
            if (!missing(inst.x[f])) observed.push_back(inst.x[f]);
        if (observed.empty())
            throw TrainError("feature '" + data.schema.features[f].name +
                             "' has no observed values to impute from");
        if (data.schema.features[f].kind == FeatureKind::numeric) {
            double sum = 0.0;
            for (double v : observed) sum += v;
            fills[f] = sum / static_cast<double>(observed.size());
        } else {
            fills[f] = modal_code(observed);
        }
    }
    return fills;
}

void mean_impute(Dataset& data) {
    if (!has_missing(data)) return;
    const auto fills = impute_fill_values(data);
    for (auto& inst : data.instances)
        for (size_t f = 0; f < inst.x.size(); ++f)
            if (missing(inst.x[f])) inst.x[f] = fills[f];
}

void knn_impute(Dataset& data, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!has_missing(data)) return;
    const auto fills = impute_fill_values(data); // also validates observability
    const auto dim = static_cast<size_t>(data.dimension());
    const auto n = data.instances.size();

    // standardize distances with observed-entry statistics
    std::vector<double> mean(dim, 0.0), inv_sd(dim, 0.0);
    for (size_t f = 0; f < dim; ++f) {
        double sum = 0.0;
        int cnt = 0;
        for (const auto& inst : data.instances)
            if (!missing(inst.x[f])) {
                sum += inst.x[f];
                ++cnt;
            }
        mean[f] = sum / static_cast<double>(cnt);
        double ss = 0.0;
        for (const auto& inst : data.instances)
            if (!missing(inst.x[f])) ss += (inst.x[f] - mean[f]) * (inst.x[f] - mean[f]);
        const double sd = std::sqrt(ss / static_cast<double>(cnt));
        inv_sd[f] = sd > 0.0 ? 1.0 / sd : 0.0;
    }

    // mean squared difference over features observed in both rows;
    // rows sharing no feature are incomparable
    auto distance = [&](size_t a, size_t b, double* out) {
        const auto& xa = data.instances[a].x;
        const auto& xb = data.instances[b].x;
        double sum = 0.0;
        int shared = 0;
        for (size_t f = 0; f < dim; ++f) {
            if (missing(xa[f]) || missing(xb[f])) continue;
            const double d = (xa[f] - xb[f]) * inv_sd[f];
            sum += d * d;
            ++shared;
        }
        if (shared == 0) return false;
        *out = std::sqrt(sum / static_cast<double>(shared));
        return true;
    };

    // per feature, rows observed there are the donor pool
    std::vector<std::vector<size_t>> donors(dim);
    for (size_t f = 0; f < dim; ++f)
        for (size_t i = 0; i < n; ++i)
            if (!missing(data.instances[i].x[f])) donors[f].push_back(i);

    // all fills computed against the original matrix, then applied at once
    std::vector<std::pair<size_t, size_t>> gaps; // (row, feature)
    std::vector<double> filled;
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t i = 0; i < n; ++i) {
        for (size_t f = 0; f < dim; ++f) {
            if (!missing(data.instances[i].x[f])) continue;
            ranked.clear();
            for (size_t d : donors[f]) {
                double dist;
                if (distance(i, d, &dist)) ranked.emplace_back(dist, d);
            }
            gaps.emplace_back(i, f);
            if (ranked.empty()) {
                filled.push_back(fills[f]); // nothing comparable: column fill
                continue;
            }
            const auto k_eff = std::min<size_t>(static_cast<size_t>(k), ranked.size());
            std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k_eff),
                              ranked.end());
            if (data.schema.features[f].kind == FeatureKind::numeric) {
                double sum = 0.0;
                for (size_t j = 0; j < k_eff; ++j)
                    sum += data.instances[ranked[j].second].x[f];
                filled.push_back(sum / static_cast<double>(k_eff));
            } else {
                std::vector<double> votes;
                votes.reserve(k_eff);
                for (size_t j = 0; j < k_eff; ++j)
                    votes.push_back(data.instances[ranked[j].second].x[f]);
                filled.push_back(modal_code(votes));
            }
        }
    }
    for (size_t g = 0; g < gaps.size(); ++g)
        data.instances[gaps[g].first].x[gaps[g].second] = filled[g];
}

} // namespace cellfit
