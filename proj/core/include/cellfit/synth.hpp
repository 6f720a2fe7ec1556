#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cellfit/dataset.hpp"
#include "cellfit/hypercube.hpp"
#include "cellfit/loss.hpp"
#include "cellfit/model.hpp"

namespace cellfit {

enum class MarginKind { uniform, normal };

struct DimSpec {
    MarginKind kind = MarginKind::uniform;
    double a = 0.0; // uniform: lower bound; normal: mean
    double b = 1.0; // uniform: upper bound; normal: standard deviation
};

struct CellRate {
    Hypercube cell;
    double rate = 0.5; // P(y = 1 | x in cell)
};

// Ground-truth generator: numeric features drawn independently per
// dimension, labels Bernoulli with a piecewise-constant rate over a
// disjoint cell cover. Entries go missing independently at missing_rate.
struct SynthSpec {
    std::vector<DimSpec> margins;
    std::vector<CellRate> cells;
    double missing_rate = 0.0;

    int dimension() const { return static_cast<int>(margins.size()); }
    FeatureSchema schema() const; // numeric features x1..xD, label "label"
    void validate() const;        // cells must be disjoint, rates in [0,1]

    double rate_at(std::span<const double> x) const;

    // Frozen presets used across tests and the CLI.
    static SynthSpec checkerboard();   // 2-D, 6 cells, rates 0.97 / 0.03
    static SynthSpec three_segments(); // 1-D, 3 segments
    static SynthSpec xor_quadrants();  // 2-D, 4 quadrant cells, rates 0.95 / 0.05
    static SynthSpec named(const std::string& name);
};

Dataset sample(const SynthSpec& spec, int n, std::uint64_t seed);

// One-factor Gaussian panel: every feature pair shares correlation rho, the
// label marks the sign of the shared factor. This is the reference input for
// imputation experiments, where cross-feature correlation is what a
// nearest-neighbour fill exploits and a column mean cannot.
Dataset correlated_panel(int n, int dims, double rho, std::uint64_t seed);

// Probability mass the margins place on `cell` (product over dimensions).
double cell_mass(const SynthSpec& spec, const Hypercube& cell);

// Exact expected loss of a model whose cells all carry constant predictors,
// integrating over every (model cell x truth cell) intersection. Throws
// std::invalid_argument if any predictor is not constant.
double true_expected_loss(const SynthSpec& spec, const PartitionModel& model, LossKind kind);

// Expected loss of always predicting the local true rate (the floor any
// model can reach).
double bayes_loss(const SynthSpec& spec, LossKind kind);

} // namespace cellfit
