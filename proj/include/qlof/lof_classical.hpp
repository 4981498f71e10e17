#pragma once

#include <cstddef>
#include <vector>

#include "qlof/dataset.hpp"

namespace qlof {

/// One point's k-distance neighbourhood. Distances are normalized
/// (divided by sqrt(n) * C) and aligned with `neighbors`, which is sorted by
/// ascending index.
struct NeighborhoodRow {
    double kdist = 0.0;
    std::vector<std::size_t> neighbors;
    std::vector<double> dists;

    std::size_t count() const noexcept { return neighbors.size(); }
};

using NeighborhoodTable = std::vector<NeighborhoodRow>;

struct PointScore {
    std::size_t index = 0;
    double kdist = 0.0;
    std::size_t count = 0;
    double lrd = 0.0;
    double lof = 0.0;
    bool flagged = false;
};

/// Output of the classical detector; lrd values are in normalized units
/// (the raw-unit density is lrd / (sqrt(n) * C)).
struct LofReport {
    std::size_t k = 0;
    double delta = 0.0;
    std::vector<PointScore> points;
    std::size_t flagged_count = 0; // T

    std::vector<std::size_t> flagged_indices() const;
};

/// Brute-force LOF by direct pairwise computation, O(m^2 n + m^2 log m).
/// Holds the distance matrix, neighbourhoods, densities and scores.
class ClassicalLof {
public:
    ClassicalLof(const Dataset& ds, std::size_t k);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return table_.size(); }
    double distance(std::size_t i, std::size_t t) const;
    const NeighborhoodTable& table() const noexcept { return table_; }
    const NeighborhoodRow& row(std::size_t i) const { return table_.at(i); }
    double reach_dist(std::size_t i, std::size_t t) const;
    double lrd(std::size_t i) const { return lrd_.at(i); }
    double lof(std::size_t i) const { return lof_.at(i); }
    const std::vector<double>& lrds() const noexcept { return lrd_; }
    const std::vector<double>& lofs() const noexcept { return lof_; }

    LofReport report(double delta) const;

private:
    std::size_t k_;
    std::size_t m_;
    std::vector<double> dist_;
    NeighborhoodTable table_;
    std::vector<double> lrd_;
    std::vector<double> lof_;
};

/// k-th smallest normalized distance from point i to the other points.
double k_distance(const Dataset& ds, std::size_t i, std::size_t k);
NeighborhoodRow neighborhood(const Dataset& ds, std::size_t i, std::size_t k);
/// max{k_d(x^t), d(x^i, x^t)}, normalized.
double reach_dist(const Dataset& ds, std::size_t i, std::size_t t, std::size_t k);
double lrd(const Dataset& ds, std::size_t i, std::size_t k);
double lof(const Dataset& ds, std::size_t i, std::size_t k);
LofReport flag(const Dataset& ds, std::size_t k, double delta);

/// Sum of values in ascending order, so the result does not depend on the
/// order the terms were produced in.
double ordered_sum(std::vector<double> terms);

} // namespace qlof
