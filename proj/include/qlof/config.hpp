#pragma once

#include <cstddef>
#include <cstdint>

#include "qlof/fixedpoint.hpp"
#include "qlof/primitives.hpp"

namespace qlof {

/// Every knob of a detector run. Defaults follow the desk-scale settings the
/// tools use.
struct RunConfig {
    std::size_t k = 2;
    double delta = 1.5;
    unsigned fp_width = 16;
    unsigned fp_frac = 12;
    unsigned ae_qubits_dist = 10;  // distance estimation precision, eps1 = pi / 2^t
    unsigned ae_qubits_count = 8;  // neighbour counting precision
    unsigned ae_qubits_lof = 10;   // LOF amplitude estimation, eps3 = pi / 2^t
    unsigned ae_repeats = 5;       // odd; median of this many estimates
    std::size_t shots = 64;        // cap on neighbour-collection searches per point
    std::uint64_t seed = 1;
    Backend backend = Backend::exact;

    double e_safety = 2.0;             // E = e_safety * (max density ratio)
    double neighbor_tolerance = 2.0;   // in units of eps1, see find_neighbors
    unsigned min_boost = 3;            // independent minimum-search runs
    double min_budget_factor = 22.5;
    double search_cap_factor = 16.0;
    std::size_t neighbor_retry = 2;    // extra searches when fewer neighbours than counted

    FixedFormat fixed_format() const { return {fp_width, fp_frac}; }
    double eps1() const;
    double eps3() const;

    /// Throws ConfigError naming the first violated constraint. `points` is
    /// the dataset size m (k must lie in [1, m-1]); pass 0 to skip that check.
    void validate(std::size_t points = 0) const;
};

} // namespace qlof
