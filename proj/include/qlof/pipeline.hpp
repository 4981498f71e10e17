#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlof/config.hpp"
#include "qlof/dataset.hpp"
#include "qlof/fixedpoint.hpp"
#include "qlof/ledger.hpp"
#include "qlof/lof_classical.hpp"
#include "qlof/primitives.hpp"

namespace qlof {

// ---------------------------------------------------------------------------
// Neighbourhoods: k-distances and neighbour sets from estimated distances

/// Estimate of the normalized distance between points i and t by amplitude
/// estimation of the ancilla-|0> probability (1/n) sum_j ((x_j^i - x_j^t)/C)^2
/// followed by the sine map theta_hat -> sin(theta_hat).
double estimate_distance(const Dataset& ds, std::size_t i, std::size_t t, unsigned t1, unsigned repeats,
                         Backend backend, Rng& rng);

/// Register content after distance estimation for a fixed point i: one
/// estimate per other point. Search primitives run over the domain
/// [0, others.size()).
struct DistanceRow {
    std::size_t point = 0;
    std::vector<std::size_t> others;
    std::vector<double> estimates;

    double estimate_for(std::size_t t) const;
};

DistanceRow estimate_distances(const Dataset& ds, std::size_t i, const RunConfig& config, Rng& rng);

/// k-th smallest estimated distance via successive minimum searches.
double find_k_distance(const DistanceRow& row, const RunConfig& config, Rng& rng, QueryLedger* ledger = nullptr);

/// Neighbour predicate: estimate <= kdist + neighbor_tolerance * eps1.
bool is_neighbor_estimate(double estimate, double kdist, const RunConfig& config);

struct NeighborSearch {
    std::vector<std::size_t> neighbors; // point indices, ascending
    bool near_threshold = false;
};

/// Repeated Grover searches over the neighbour predicate, excluding points
/// already found, until a search comes back empty with at least
/// `count_hint` points collected (or the retry/shot caps are reached).
NeighborSearch find_neighbors(const DistanceRow& row, double kdist, std::size_t count_hint, const RunConfig& config,
                              Rng& rng, QueryLedger* ledger = nullptr);

CountEstimate count_neighbors(const DistanceRow& row, double kdist, const RunConfig& config, Rng& rng,
                              QueryLedger* ledger = nullptr);

struct Step1Result {
    NeighborhoodTable table;               // estimated k-distances and distances
    std::vector<std::size_t> count_estimates;
    std::vector<char> near_threshold;
    std::vector<std::string> warnings;
};

/// Neighbourhoods for every point. Ledger keys: step1.q.min, step1.q.grover,
/// step1.q.count (distance-oracle queries) and step1.ox (O_X applications
/// implied by those queries).
Step1Result build_neighborhood_table(const Dataset& ds, const RunConfig& config, QueryLedger* ledger = nullptr);

/// Distance-oracle query cost in O_X applications: every query runs one
/// amplitude estimation block of `repeats` runs, each using the two-load
/// state preparer 2(2^t - 1) + 1 times.
std::uint64_t ox_per_distance_query(unsigned t1, unsigned repeats);

// ---------------------------------------------------------------------------
// Local reachability densities in fixed point

/// The QRAM maps over a neighbourhood table:
///   U: i -> (n_i, k_d(x^i)),  V: (i, t) -> d(x^i, x^t) for t in N_k(x^i),
///   G: i -> uniform superposition over j < n_i,  W: (i, j) -> j-th neighbour.
/// Neighbour slots j are zero-based and enumerate neighbours by ascending index.
class NeighborhoodOracles {
public:
    explicit NeighborhoodOracles(const NeighborhoodTable& table, QueryLedger* ledger = nullptr)
        : table_(&table), ledger_(ledger) {}

    std::pair<std::size_t, double> U(std::size_t i) const;
    double V(std::size_t i, std::size_t t) const;
    std::vector<qsim::Amplitude> G(std::size_t i) const;
    std::size_t W(std::size_t i, std::size_t j) const;

    std::size_t size() const noexcept { return table_->size(); }

private:
    const NeighborhoodRow& row(std::size_t i) const;
    void charge(const char* key) const;

    const NeighborhoodTable* table_;
    QueryLedger* ledger_;
};

struct DensityTable {
    FixedFormat format;
    std::vector<FixedPoint> inverse_lrd;                     // [lrd(x^i)]^-1, normalized units
    std::vector<std::vector<FixedPoint>> reach;              // per neighbour slot of i
    std::vector<std::vector<FixedPoint>> neighbor_inverse_lrd; // [lrd(x^t)]^-1 per neighbour slot of i
};

/// Reachability distance of slot j of point i: q_max(k_d(x^t), d(x^i, x^t)).
FixedPoint fixed_reach_dist(const NeighborhoodOracles& oracles, std::size_t i, std::size_t j, FixedFormat format);

/// Mean reachability distance of point i: multiply-add accumulation in the
/// doubled format, then q_div by n_i back into `format`.
FixedPoint fixed_inverse_lrd(const NeighborhoodOracles& oracles, std::size_t i, FixedFormat format);

/// Densities for every point. Throws std::overflow_error when the format is too
/// narrow and DegenerateDataError when a density's inverse rounds to zero.
DensityTable compute_lrd_all(const NeighborhoodTable& table, FixedFormat format, QueryLedger* ledger = nullptr);

/// Runs point i's reachability-distance map through apply_oracle on a
/// statevector (G, then |j>|0> -> |j>|reach_j>), checks every branch holds the
/// fixed-point value and that a second application restores the input.
/// Returns nullopt when the registers exceed simulator capacity.
std::optional<bool> spot_check_step2(const NeighborhoodTable& table, const DensityTable& densities, std::size_t i);

// ---------------------------------------------------------------------------
// LOF by amplitude estimation, then threshold search

struct LofEstimates {
    double E = 1.0;
    std::vector<std::vector<double>> ratios; // decoded rho_i^t per neighbour slot
    std::vector<double> amplitude;           // estimated sin^2(alpha_i)
    std::vector<double> exact_amplitude;     // (1 / (n_i E)) sum_t rho_i^t
    std::vector<double> lof;                 // E * amplitude
};

/// Ledger keys: step3.q.ae (Grover-operator applications of one coherent
/// estimation block) and step3.q.ratio (q_div calls).
LofEstimates compute_lof_all(const NeighborhoodTable& table, const DensityTable& densities, unsigned t3, double E,
                             const RunConfig& config, QueryLedger* ledger = nullptr);

struct FlagResult {
    std::vector<std::size_t> indices; // ascending
    std::uint64_t queries = 0;
    std::size_t count() const noexcept { return indices.size(); }
};

/// Repeated Grover searches for LOF >= delta, excluding found indices, until a
/// search returns empty. Ledger key: step3.q.grover.
FlagResult flag_anomalies(const std::vector<double>& lofs, double delta, Backend backend, Rng& rng,
                          const SearchOptions& options = {}, QueryLedger* ledger = nullptr);

// ---------------------------------------------------------------------------
// Error bookkeeping

struct ErrorBudget {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    double max_ratio = 1.0; // max over neighbour pairs of lrd(x^t) / lrd(x^i)
    double E = 1.0;         // advice constant for the LOF rotation, e_safety * max_ratio
    double P = 0.0;         // largest P with half of every neighbourhood's distances >= sqrt(P)
    double total_bound = 0.0; // E * eps3 + 8 * eps1 / P
    bool vacuous = false;     // total_bound exceeds the largest LOF
};

/// Largest P such that, for every point, at least half of its neighbour
/// distances are >= sqrt(P).
double half_neighborhood_constant(const NeighborhoodTable& table);

ErrorBudget error_budget(const RunConfig& config, const ClassicalLof& oracle);
ErrorBudget error_budget(const RunConfig& config, const Dataset& ds);

// ---------------------------------------------------------------------------
// End to end

struct QlofRun {
    RunConfig config;
    ErrorBudget budget;
    Step1Result step1;
    DensityTable densities;
    LofEstimates lofs;
    FlagResult flags;
    QueryLedger ledger;
    std::optional<bool> step2_spot_check;
    std::vector<std::string> warnings;
};

/// The three-step quantum detector. E and P are taken from the classical
/// oracle as advice.
QlofRun run_qlof(const Dataset& ds, const RunConfig& config);

struct Comparison {
    QlofRun quantum;
    LofReport classical;
    bool flags_match = false;
    /// min_i |LOF(i) - delta| > total_bound: the regime where flags must agree.
    bool margin_ok = false;
    std::vector<std::size_t> near_threshold_points;
    double max_lof_error = 0.0;
    bool all_within_bound = false;
};

Comparison compare(const Dataset& ds, const RunConfig& config);

} // namespace qlof
