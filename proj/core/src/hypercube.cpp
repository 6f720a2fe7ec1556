#include "cellfit/hypercube.hpp"

#include <stdexcept>
#include <string>

namespace cellfit {

Hypercube Hypercube::full_space(int dimension) {
    if (dimension <= 0) throw std::invalid_argument("hypercube dimension must be positive");
    Hypercube cube;
    cube.bounds.resize(static_cast<size_t>(dimension)); // defaults are (-inf, inf)
    return cube;
}

void Hypercube::validate() const {
    if (bounds.empty()) throw std::invalid_argument("hypercube has no axes");
    for (size_t j = 0; j < bounds.size(); ++j)
        if (!(bounds[j].lo < bounds[j].hi))
            throw std::invalid_argument("empty interval on axis " + std::to_string(j));
}

bool Hypercube::contains(std::span<const double> x) const {
    if (x.size() != bounds.size())
        throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                    " does not match hypercube dimension " +
                                    std::to_string(bounds.size()));
    for (size_t j = 0; j < bounds.size(); ++j)
        if (!bounds[j].contains(x[j])) return false;
    return true;
}

std::pair<Hypercube, Hypercube> Hypercube::split(int dim, double threshold) const {
    if (dim < 0 || dim >= dimension()) throw std::invalid_argument("split axis out of range");
    const Interval& iv = bounds[static_cast<size_t>(dim)];
    if (!(iv.lo < threshold && threshold < iv.hi))
        throw std::invalid_argument("split threshold not strictly inside the cell");
    Hypercube below = *this;
    Hypercube above = *this;
    below.bounds[static_cast<size_t>(dim)].hi = threshold;
    above.bounds[static_cast<size_t>(dim)].lo = threshold;
    return {below, above};
}

bool Hypercube::intersects(const Hypercube& other) const {
    if (bounds.size() != other.bounds.size())
        throw std::invalid_argument("hypercube dimension mismatch");
    // Half-open boxes overlap iff the intervals overlap on every axis.
    for (size_t j = 0; j < bounds.size(); ++j) {
        const auto& a = bounds[j];
        const auto& b = other.bounds[j];
        if (a.hi <= b.lo || b.hi <= a.lo) return false;
    }
    return true;
}

bool Partition::pairwise_disjoint() const {
    for (size_t i = 0; i < cells.size(); ++i)
        for (size_t j = i + 1; j < cells.size(); ++j)
            if (cells[i].intersects(cells[j])) return false;
    return true;
}

int Partition::find(std::span<const double> x) const {
    for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i].contains(x)) return static_cast<int>(i);
    return -1;
}

} // namespace cellfit
