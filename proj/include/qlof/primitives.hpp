#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qlof/ledger.hpp"
#include "qlof/qsim.hpp"
#include "qlof/random.hpp"

namespace qlof {

/// exact: full statevector simulation. ledger: outcomes drawn from each
/// primitive's analytic output law, with identical query accounting.
enum class Backend { exact, ledger };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

using IndexPredicate = std::function<bool(std::size_t)>;
using ValueOracle = std::function<double(std::size_t)>;

// ---------------------------------------------------------------------------
// Amplitude estimation

/// Amplitude-estimation input: a state-preparer A|0> with a good-branch
/// predicate, or just the good probability a (the exact backend then uses a
/// single-qubit R_y preparer with the same a).
class AmplitudeProblem {
public:
    static AmplitudeProblem from_state(qsim::StateVector prepared, std::function<bool(std::uint64_t)> good);
    static AmplitudeProblem from_probability(double a);

    double probability() const noexcept { return probability_; }
    /// Grover operator of the preparer (builds the one-qubit preparer if needed).
    qsim::GroverOperator grover() const;

private:
    AmplitudeProblem() = default;

    std::optional<qsim::StateVector> prepared_;
    std::function<bool(std::uint64_t)> good_;
    double probability_ = 0.0;
};

struct AmplitudeEstimate {
    double theta_hat = 0.0; // in [0, pi/2]
    double a_hat = 0.0;     // sin^2(theta_hat)
    unsigned t = 0;
    std::uint64_t queries = 0; // Grover-operator applications, all repeats
    std::uint64_t y = 0;       // counting-register outcome behind the reported estimate
};

/// Maps a counting-register outcome y to theta_hat = arcsin(sqrt(sin^2(pi y / 2^t))).
double theta_from_outcome(std::uint64_t y, unsigned t);

/// Distribution of the counting register for this problem and backend.
std::vector<double> amplitude_estimation_law(const AmplitudeProblem& problem, unsigned t, Backend backend);

/// Median of `repeats` (odd) independent estimates, each with t precision
/// qubits. Each run costs 2^t - 1 Grover-operator applications.
AmplitudeEstimate amplitude_estimate(const AmplitudeProblem& problem, unsigned t, Backend backend, Rng& rng,
                                     unsigned repeats = 1, const LedgerTap& tap = {});

// ---------------------------------------------------------------------------
// Grover search with an unknown number of solutions

struct SearchOptions {
    /// Total predicate queries (iterations plus verifications) allowed before
    /// reporting not-found: ceil(cap_factor * sqrt(m)) unless `cap` is set.
    double cap_factor = 16.0;
    std::optional<std::uint64_t> cap;
    /// Growth of the iteration range per failed round (between 1 and 4/3).
    double growth = 1.2;
};

struct SearchResult {
    std::optional<std::size_t> index;
    std::uint64_t queries = 0;    // predicate queries: one per Grover iteration plus one per verification
    std::uint64_t iterations = 0; // Grover iterations only
};

/// Exponentially growing random-iteration schedule for an unknown count of
/// solutions. A solution found is returned uniformly at random.
SearchResult grover_search(const IndexPredicate& pred, std::size_t m, Backend backend, Rng& rng,
                           const SearchOptions& options = {}, const LedgerTap& tap = {});

/// Exact statevector after `iterations` Grover iterations from the uniform
/// state over [0, m).
qsim::StateVector grover_state(const IndexPredicate& pred, std::size_t m, std::uint64_t iterations);

/// Success law sin^2((2j+1) theta) with sin^2(theta) = solutions / m.
double grover_success_probability(std::size_t solutions, std::size_t m, std::uint64_t iterations);

// ---------------------------------------------------------------------------
// Minimum and k-th smallest finding

struct MinimumOptions {
    /// Iteration budget per run is ceil(budget_factor * sqrt(m)).
    double budget_factor = 22.5;
    /// Independent runs; the best verified result wins (success >= 1 - 2^-boost).
    unsigned boost = 1;
    double growth = 1.2;
};

struct MinimumResult {
    std::size_t index = 0;
    double value = 0.0;
    std::uint64_t queries = 0;
};

/// Minimum search under the order (value, index): ties resolve to the lowest
/// index. Indices flagged in `excluded` are never returned.
MinimumResult quantum_min(const ValueOracle& values, std::size_t m, Backend backend, Rng& rng,
                          const MinimumOptions& options = {}, const LedgerTap& tap = {},
                          const std::vector<char>* excluded = nullptr);

struct KthResult {
    double value = 0.0;
    std::vector<std::size_t> indices; // in discovery order (ascending by (value, index))
    std::uint64_t queries = 0;
};

/// k successive minimum searches, each excluding the indices already found.
KthResult kth_smallest(const ValueOracle& values, std::size_t m, std::size_t k, Backend backend, Rng& rng,
                       const MinimumOptions& options = {}, const LedgerTap& tap = {});

// ---------------------------------------------------------------------------
// Quantum counting

struct CountEstimate {
    double estimate = 0.0;   // m sin^2(pi y / 2^t)
    std::size_t count = 0;   // estimate rounded to the nearest integer
    std::uint64_t y = 0;
    std::uint64_t queries = 0;
};

CountEstimate quantum_count(const IndexPredicate& pred, std::size_t m, unsigned t, Backend backend, Rng& rng,
                            unsigned repeats = 1, const LedgerTap& tap = {});

/// Error bound |estimate - n| <= 2 pi sqrt(n (m - n)) / 2^t + pi^2 m / 4^t that
/// holds with probability >= 8/pi^2.
double counting_error_bound(std::size_t n, std::size_t m, unsigned t);

/// Smallest t whose counting_error_bound is <= eps for every count n <= n_max.
unsigned counting_qubits_for(std::size_t m, std::size_t n_max, double eps);

} // namespace qlof
