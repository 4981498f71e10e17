#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qlof/dataset.hpp"

namespace qlof {

struct ClusterSpec {
    std::size_t points = 32;
    std::size_t dim = 2;
    double contamination = 0.1; // fraction of planted outliers, at least one if > 0
    double spread = 1.0;        // per-axis standard deviation of each cluster
    double separation = 6.0;    // distance between the two cluster centres along every axis
    std::uint64_t seed = 1;
};

struct SyntheticData {
    Dataset data;
    std::vector<std::size_t> outliers; // planted indices, ascending
};

/// Two Gaussian clusters plus outliers drawn uniformly from a box three times
/// wider than the clusters' span. Outliers occupy the last rows.
SyntheticData gaussian_clusters(const ClusterSpec& spec);

/// Uniform points in [0, 1]^n placed one at a time, each at distance at least
/// `min_separation` (hence at least `min_separation * C`) from the others.
/// Throws std::runtime_error after too many tries.
Dataset separated_uniform(std::size_t m, std::size_t n, double min_separation, std::uint64_t seed);

/// Regular grid with `side` points per axis and unit spacing.
Dataset uniform_grid(std::size_t side, std::size_t dim);

} // namespace qlof
