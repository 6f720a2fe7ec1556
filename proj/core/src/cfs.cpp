#include "cellfit/cfs.hpp"

#include <algorithm>
#include <cmath>

#include "cellfit/errors.hpp"

namespace cellfit {
namespace {

// abs Pearson between feature f (or the label when f == -1) and g over rows;
// pearson() itself drops pairs with a NaN on either side
double abs_corr(const Dataset& data, std::span<const int> rows, int f, int g) {
    std::vector<double> a, b;
    a.reserve(rows.size());
    b.reserve(rows.size());
    for (int r : rows) {
        const auto& inst = data.instances[static_cast<size_t>(r)];
        a.push_back(f < 0 ? static_cast<double>(inst.y) : inst.x[static_cast<size_t>(f)]);
        b.push_back(g < 0 ? static_cast<double>(inst.y) : inst.x[static_cast<size_t>(g)]);
    }
    return std::abs(pearson(a, b));
}

} // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    std::vector<double> a, b;
    a.reserve(x.size());
    b.reserve(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        a.push_back(x[i]);
        b.push_back(y[i]);
    }
    const auto n = a.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += a[i];
        my += b[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = a[i] - mx;
        const double dy = b[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0; // constant input carries no signal
    return sxy / std::sqrt(sxx * syy);
}

double cfs_merit(const Dataset& data, std::span<const int> rows, std::span<const int> features) {
    if (features.empty()) return 0.0;
    const double k = static_cast<double>(features.size());
    double rcf = 0.0;
    for (int f : features) rcf += abs_corr(data, rows, f, -1);
    rcf /= k;

    double rff = 0.0;
    if (features.size() > 1) {
        int pairs = 0;
        for (size_t i = 0; i < features.size(); ++i)
            for (size_t j = i + 1; j < features.size(); ++j) {
                rff += abs_corr(data, rows, features[i], features[j]);
                ++pairs;
            }
        rff /= static_cast<double>(pairs);
    }
    const double denom = std::sqrt(k + k * (k - 1.0) * rff);
    return denom > 0.0 ? k * rcf / denom : 0.0;
}

CfsResult cfs_select(const Dataset& data, std::span<const int> rows, int stall) {
    if (stall < 1) throw std::invalid_argument("stall must be >= 1");
    const int dim = data.dimension();
    CfsResult result;
    std::vector<bool> used(static_cast<size_t>(dim), false);
    std::vector<int> current;
    size_t best_len = 0;
    int since_best = 0;

    while (static_cast<int>(current.size()) < dim) {
        int pick = -1;
        double pick_merit = -1.0;
        for (int f = 0; f < dim; ++f) {
            if (used[static_cast<size_t>(f)]) continue;
            current.push_back(f);
            const double merit = cfs_merit(data, rows, current);
            current.pop_back();
            if (merit > pick_merit + 1e-15) { // strict: ties keep the lowest index
                pick_merit = merit;
                pick = f;
            }
        }
        if (pick < 0) break;
        used[static_cast<size_t>(pick)] = true;
        current.push_back(pick);
        result.path.push_back(pick);
        result.merits.push_back(pick_merit);

        if (pick_merit > result.best_merit + 1e-12) {
            result.best_merit = pick_merit;
            best_len = current.size();
            since_best = 0;
        } else if (++since_best >= stall) {
            break;
        }
    }
    result.selected.assign(result.path.begin(),
                           result.path.begin() + static_cast<std::ptrdiff_t>(best_len));
    return result;
}

Dataset project_features(const Dataset& data, std::span<const int> keep) {
    if (keep.empty()) throw std::invalid_argument("cannot project onto zero features");
    Dataset out;
    out.role = data.role;
    out.schema.label_name = data.schema.label_name;
    for (int f : keep) {
        if (f < 0 || f >= data.dimension())
            throw std::invalid_argument("projected feature index out of range");
        out.schema.features.push_back(data.schema.features[static_cast<size_t>(f)]);
    }
    out.instances.reserve(data.instances.size());
    for (const auto& inst : data.instances) {
        LabeledInstance proj;
        proj.y = inst.y;
        proj.x.reserve(keep.size());
        for (int f : keep) proj.x.push_back(inst.x[static_cast<size_t>(f)]);
        out.instances.push_back(std::move(proj));
    }
    return out;
}

} // namespace cellfit
