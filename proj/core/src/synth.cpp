#include "cellfit/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "cellfit/rng.hpp"

namespace cellfit {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488016887242097); }

double interval_mass(const DimSpec& margin, const Interval& iv) {
    if (margin.kind == MarginKind::uniform) {
        const double lo = std::max(iv.lo, margin.a);
        const double hi = std::min(iv.hi, margin.b);
        if (hi <= lo) return 0.0;
        return (hi - lo) / (margin.b - margin.a);
    }
    const double lo = (iv.lo - margin.a) / margin.b;
    const double hi = (iv.hi - margin.a) / margin.b;
    return normal_cdf(hi) - normal_cdf(lo);
}

// expected pointwise loss when predicting constant p against true rate r
double expected_loss(double p, double r, LossKind kind) {
    switch (kind) {
        case LossKind::zero_one:
            return predicted_class(p) == 1 ? 1.0 - r : r;
        case LossKind::log_loss: {
            const double q = std::clamp(p, kProbClip, 1.0 - kProbClip);
            return -(r * std::log(q) + (1.0 - r) * std::log(1.0 - q));
        }
        case LossKind::brier:
            return r * (1.0 - p) * (1.0 - p) + (1.0 - r) * p * p;
    }
    return 0.0;
}

} // namespace

FeatureSchema SynthSpec::schema() const {
    FeatureSchema schema;
    for (int j = 0; j < dimension(); ++j) {
        FeatureSpec f;
        f.name = "x" + std::to_string(j + 1);
        f.kind = FeatureKind::numeric;
        schema.features.push_back(std::move(f));
    }
    return schema;
}

void SynthSpec::validate() const {
    if (margins.empty()) throw std::invalid_argument("generator needs at least one dimension");
    for (const auto& margin : margins) {
        if (margin.kind == MarginKind::uniform && !(margin.a < margin.b))
            throw std::invalid_argument("uniform margin needs a < b");
        if (margin.kind == MarginKind::normal && !(margin.b > 0.0))
            throw std::invalid_argument("normal margin needs positive sd");
    }
    if (cells.empty()) throw std::invalid_argument("generator needs at least one rate cell");
    Partition part;
    for (const auto& cell : cells) {
        if (cell.cell.dimension() != dimension())
            throw std::invalid_argument("rate cell dimension mismatch");
        cell.cell.validate();
        if (!(cell.rate >= 0.0 && cell.rate <= 1.0))
            throw std::invalid_argument("rate outside [0,1]");
        part.cells.push_back(cell.cell);
    }
    if (!part.pairwise_disjoint()) throw std::invalid_argument("rate cells overlap");
}

double SynthSpec::rate_at(std::span<const double> x) const {
    for (const auto& cell : cells)
        if (cell.cell.contains(x)) return cell.rate;
    throw std::out_of_range("point not covered by any rate cell");
}

SynthSpec SynthSpec::checkerboard() {
    SynthSpec spec;
    spec.margins = {{MarginKind::uniform, -1.0, 1.0}, {MarginKind::uniform, -1.0, 1.0}};
    const Hypercube full = Hypercube::full_space(2);
    auto [left, mid_right] = full.split(0, 0.0);
    auto [mid, right] = mid_right.split(0, 0.5);
    const double hi = 0.97, lo = 0.03;
    for (const auto& [column, bottom_rate] :
         {std::pair{left, hi}, std::pair{mid, lo}, std::pair{right, hi}}) {
        auto [bottom, top] = column.split(1, 0.0);
        spec.cells.push_back({bottom, bottom_rate});
        spec.cells.push_back({top, 1.0 - bottom_rate});
    }
    return spec;
}

SynthSpec SynthSpec::three_segments() {
    SynthSpec spec;
    spec.margins = {{MarginKind::uniform, 0.0, 1.0}};
    const Hypercube full = Hypercube::full_space(1);
    auto [a, bc] = full.split(0, 0.3);
    auto [b, c] = bc.split(0, 0.7);
    spec.cells = {{a, 0.9}, {b, 0.1}, {c, 0.8}};
    return spec;
}

SynthSpec SynthSpec::xor_quadrants() {
    SynthSpec spec;
    spec.margins = {{MarginKind::uniform, -1.0, 1.0}, {MarginKind::uniform, -1.0, 1.0}};
    const Hypercube full = Hypercube::full_space(2);
    auto [left, right] = full.split(0, 0.0);
    auto [ll, lh] = left.split(1, 0.0);
    auto [rl, rh] = right.split(1, 0.0);
    // success is likely when the two coordinates agree in sign
    spec.cells = {{ll, 0.95}, {lh, 0.05}, {rl, 0.05}, {rh, 0.95}};
    return spec;
}

SynthSpec SynthSpec::named(const std::string& name) {
    if (name == "checkerboard") return checkerboard();
    if (name == "three_segments") return three_segments();
    if (name == "xor") return xor_quadrants();
    throw std::invalid_argument("unknown generator preset: " + name +
                                " (expected xor, checkerboard, or three_segments)");
}

Dataset sample(const SynthSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 0) throw std::invalid_argument("sample size must be non-negative");
    Dataset data;
    data.schema = spec.schema();
    data.role = DatasetRole::unsplit;
    data.instances.reserve(static_cast<size_t>(n));
    Rng rng(derive_seed(seed, SeedStream::synth));
    const auto dim = static_cast<size_t>(spec.dimension());
    for (int i = 0; i < n; ++i) {
        LabeledInstance inst;
        inst.x.resize(dim);
        for (size_t j = 0; j < dim; ++j) {
            const DimSpec& margin = spec.margins[j];
            inst.x[j] = margin.kind == MarginKind::uniform ? rng.uniform(margin.a, margin.b)
                                                           : rng.normal(margin.a, margin.b);
        }
        inst.y = rng.bernoulli(spec.rate_at(inst.x)) ? 1 : 0;
        if (spec.missing_rate > 0.0)
            for (size_t j = 0; j < dim; ++j)
                if (rng.bernoulli(spec.missing_rate))
                    inst.x[j] = std::numeric_limits<double>::quiet_NaN();
        data.instances.push_back(std::move(inst));
    }
    return data;
}

Dataset correlated_panel(int n, int dims, double rho, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample size must be non-negative");
    if (dims < 2) throw std::invalid_argument("correlated panel needs at least two features");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");

    Dataset data;
    for (int j = 0; j < dims; ++j) {
        FeatureSpec f;
        f.name = "x" + std::to_string(j + 1);
        data.schema.features.push_back(std::move(f));
    }
    data.role = DatasetRole::unsplit;
    data.instances.reserve(static_cast<size_t>(n));

    // one-factor Gaussian design: every pair of features shares correlation rho
    const double load = std::sqrt(rho);
    const double noise = std::sqrt(1.0 - rho);
    Rng rng(derive_seed(seed, SeedStream::synth, 1));
    for (int i = 0; i < n; ++i) {
        LabeledInstance inst;
        inst.x.resize(static_cast<size_t>(dims));
        const double factor = rng.normal(0.0, 1.0);
        for (auto& v : inst.x) v = load * factor + noise * rng.normal(0.0, 1.0);
        inst.y = factor >= 0.0 ? 1 : 0;
        data.instances.push_back(std::move(inst));
    }
    return data;
}

double cell_mass(const SynthSpec& spec, const Hypercube& cell) {
    if (cell.dimension() != spec.dimension())
        throw std::invalid_argument("cell dimension mismatch");
    double mass = 1.0;
    for (int j = 0; j < spec.dimension(); ++j) {
        mass *= interval_mass(spec.margins[static_cast<size_t>(j)],
                              cell.bounds[static_cast<size_t>(j)]);
        if (mass == 0.0) return 0.0;
    }
    return mass;
}

double true_expected_loss(const SynthSpec& spec, const PartitionModel& model, LossKind kind) {
    spec.validate();
    if (model.dimension() != spec.dimension())
        throw std::invalid_argument("model dimension disagrees with generator");
    double total = 0.0;
    for (const auto& tc : model.cells) {
        const auto* constant = std::get_if<ConstantModel>(&tc.predictor.state);
        if (!constant)
            throw std::invalid_argument(
                "exact expected loss needs constant per-cell predictors");
        for (const auto& truth : spec.cells) {
            // intersection of two axis-aligned boxes, dimension by dimension
            Hypercube overlap = tc.cell;
            bool empty = false;
            for (size_t j = 0; j < overlap.bounds.size(); ++j) {
                overlap.bounds[j].lo = std::max(overlap.bounds[j].lo, truth.cell.bounds[j].lo);
                overlap.bounds[j].hi = std::min(overlap.bounds[j].hi, truth.cell.bounds[j].hi);
                if (!(overlap.bounds[j].lo < overlap.bounds[j].hi)) {
                    empty = true;
                    break;
                }
            }
            if (empty) continue;
            const double mass = cell_mass(spec, overlap);
            if (mass > 0.0) total += mass * expected_loss(constant->p, truth.rate, kind);
        }
    }
    return total;
}

double bayes_loss(const SynthSpec& spec, LossKind kind) {
    spec.validate();
    double total = 0.0;
    for (const auto& cell : spec.cells) {
        const double mass = cell_mass(spec, cell.cell);
        if (mass > 0.0) total += mass * expected_loss(cell.rate, cell.rate, kind);
    }
    return total;
}

} // namespace cellfit
