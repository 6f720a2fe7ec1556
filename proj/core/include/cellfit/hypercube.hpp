#pragma once
#include <limits>
#include <span>
#include <vector>

namespace cellfit {

// Half-open interval [lo, hi). Cells use half-open bounds so that guillotine
// cuts tile the space exactly: closed boxes cannot be disjoint and still
// cover the reals.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return lo <= v && v < hi; }
    bool operator==(const Interval&) const = default;
};

struct Hypercube {
    std::vector<Interval> bounds;

    static Hypercube full_space(int dimension);

    int dimension() const { return static_cast<int>(bounds.size()); }

    // throws std::invalid_argument on an empty interval (lo >= hi)
    void validate() const;

    // true iff lo_j <= x_j < hi_j for every axis; dimension mismatch throws
    bool contains(std::span<const double> x) const;

    // axis-aligned guillotine cut at `threshold` along `dim`;
    // threshold must lie strictly inside the current interval
    std::pair<Hypercube, Hypercube> split(int dim, double threshold) const;

    bool intersects(const Hypercube& other) const;

    bool operator==(const Hypercube&) const = default;
};

// A disjoint cover of the full space by hypercubes.
struct Partition {
    std::vector<Hypercube> cells;

    int size() const { return static_cast<int>(cells.size()); }

    // exact pairwise-disjointness check via per-dimension interval overlap
    bool pairwise_disjoint() const;

    // index of the unique containing cell, or -1
    int find(std::span<const double> x) const;
};

} // namespace cellfit
