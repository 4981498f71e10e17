#include "qlof/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qlof {

std::string_view to_string(Backend b) {
    return b == Backend::exact ? "exact" : "ledger";
}

Backend parse_backend(std::string_view name) {
    if (name == "exact") return Backend::exact;
    if (name == "ledger") return Backend::ledger;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected exact or ledger)");
}

// ---------------------------------------------------------------------------
// Amplitude estimation

AmplitudeProblem AmplitudeProblem::from_state(qsim::StateVector prepared, std::function<bool(std::uint64_t)> good) {
    AmplitudeProblem p;
    p.probability_ = std::clamp(prepared.probability(good), 0.0, 1.0);
    p.prepared_ = std::move(prepared);
    p.good_ = std::move(good);
    return p;
}

AmplitudeProblem AmplitudeProblem::from_probability(double a) {
    if (!(a >= -1e-12 && a <= 1.0 + 1e-12)) throw std::domain_error("amplitude probability outside [0, 1]");
    AmplitudeProblem p;
    p.probability_ = std::clamp(a, 0.0, 1.0);
    return p;
}

qsim::GroverOperator AmplitudeProblem::grover() const {
    if (prepared_) return qsim::GroverOperator(*prepared_, good_);
    qsim::StateVector s(1);
    const qsim::Amplitude amps[2] = {std::sqrt(1.0 - probability_), std::sqrt(probability_)};
    qsim::prepare_register(s, s.all(), amps);
    return qsim::GroverOperator(std::move(s), [](std::uint64_t b) { return b == 1; });
}

double theta_from_outcome(std::uint64_t y, unsigned t) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(y) / std::ldexp(1.0, static_cast<int>(t)));
    return std::asin(std::min(1.0, std::abs(s)));
}

std::vector<double> amplitude_estimation_law(const AmplitudeProblem& problem, unsigned t, Backend backend) {
    if (t == 0) throw std::invalid_argument("amplitude estimation needs t >= 1");
    if (backend == Backend::ledger) {
        return qsim::amplitude_estimation_distribution(std::asin(std::sqrt(problem.probability())), t);
    }
    const auto g = problem.grover();
    return qsim::phase_estimation_distribution([&g](std::span<qsim::Amplitude> v) { g.apply(v); }, t, g.prepared());
}

AmplitudeEstimate amplitude_estimate(const AmplitudeProblem& problem, unsigned t, Backend backend, Rng& rng,
                                     unsigned repeats, const LedgerTap& tap) {
    if (repeats == 0 || repeats % 2 == 0) throw std::invalid_argument("amplitude estimation repeats must be odd");
    const auto law = amplitude_estimation_law(problem, t, backend);
    std::vector<std::pair<double, std::uint64_t>> runs;
    runs.reserve(repeats);
    for (unsigned r = 0; r < repeats; ++r) {
        const std::uint64_t y = sample_index(law, rng);
        runs.emplace_back(theta_from_outcome(y, t), y);
    }
    std::sort(runs.begin(), runs.end());
    const auto& [theta, y] = runs[repeats / 2];

    AmplitudeEstimate est;
    est.theta_hat = theta;
    est.a_hat = std::sin(theta) * std::sin(theta);
    est.t = t;
    est.y = y;
    est.queries = static_cast<std::uint64_t>(repeats) * ((std::uint64_t{1} << t) - 1);
    tap.charge(est.queries);
    return est;
}

// ---------------------------------------------------------------------------
// Grover search

double grover_success_probability(std::size_t solutions, std::size_t m, std::uint64_t iterations) {
    if (m == 0 || solutions > m) throw std::invalid_argument("invalid search domain");
    const double theta = std::asin(std::sqrt(static_cast<double>(solutions) / static_cast<double>(m)));
    const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
    return s * s;
}

namespace {

qsim::GroverOperator search_operator(const IndexPredicate& pred, std::size_t m) {
    qsim::StateVector uniform(qsim::qubits_for(m));
    qsim::prepare_uniform(uniform, uniform.all(), m);
    return qsim::GroverOperator(std::move(uniform), [&pred, m](std::uint64_t b) { return b < m && pred(b); });
}

} // namespace

qsim::StateVector grover_state(const IndexPredicate& pred, std::size_t m, std::uint64_t iterations) {
    if (m == 0) throw std::invalid_argument("empty search domain");
    const auto g = search_operator(pred, m);
    qsim::StateVector s = g.prepared();
    for (std::uint64_t j = 0; j < iterations; ++j) g.apply(s);
    return s;
}

SearchResult grover_search(const IndexPredicate& pred, std::size_t m, Backend backend, Rng& rng,
                           const SearchOptions& options, const LedgerTap& tap) {
    if (m == 0) throw std::invalid_argument("empty search domain");
    if (!(options.growth > 1.0 && options.growth <= 4.0 / 3.0)) {
        throw std::invalid_argument("search growth must lie in (1, 4/3]");
    }
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    const std::uint64_t cap =
        options.cap ? *options.cap : static_cast<std::uint64_t>(std::ceil(options.cap_factor * sqrt_m));

    // Simulator bookkeeping only; none of this is charged as queries.
    std::vector<std::size_t> solutions;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < m; ++i) (pred(i) ? solutions : others).push_back(i);

    std::optional<qsim::GroverOperator> op;
    if (backend == Backend::exact) op.emplace(search_operator(pred, m));

    SearchResult result;
    double range = 1.0;
    while (true) {
        const auto j = uniform_below(rng, static_cast<std::uint64_t>(std::ceil(range)));
        if (result.queries + j + 1 > cap) break;
        result.iterations += j;
        result.queries += j + 1;

        std::size_t outcome = 0;
        if (backend == Backend::exact) {
            qsim::StateVector s = op->prepared();
            for (std::uint64_t r = 0; r < j; ++r) op->apply(s);
            outcome = qsim::measure(s, s.all(), 1, rng).front();
        } else {
            const double p = grover_success_probability(solutions.size(), m, j);
            const bool hit = !solutions.empty() && (others.empty() || uniform01(rng) < p);
            const auto& pool = hit ? solutions : others;
            outcome = pool[uniform_below(rng, pool.size())];
        }
        if (outcome < m && pred(outcome)) {
            result.index = outcome;
            break;
        }
        range = std::min(range * options.growth, sqrt_m);
    }
    tap.charge(result.queries);
    return result;
}

// ---------------------------------------------------------------------------
// Minimum finding

MinimumResult quantum_min(const ValueOracle& values, std::size_t m, Backend backend, Rng& rng,
                          const MinimumOptions& options, const LedgerTap& tap, const std::vector<char>* excluded) {
    if (m == 0) throw std::invalid_argument("empty minimum-search domain");
    if (options.boost == 0) throw std::invalid_argument("minimum search needs boost >= 1");
    auto is_excluded = [excluded](std::size_t i) { return excluded != nullptr && (*excluded)[i] != 0; };
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < m; ++i) {
        if (!is_excluded(i)) candidates.push_back(i);
    }
    if (candidates.empty()) throw std::invalid_argument("every index is excluded from the minimum search");

    const auto budget = static_cast<std::uint64_t>(std::ceil(options.budget_factor * std::sqrt(static_cast<double>(m))));
    MinimumResult best;
    bool have_best = false;
    std::uint64_t total = 0;

    for (unsigned run = 0; run < options.boost; ++run) {
        std::size_t y = candidates[uniform_below(rng, candidates.size())];
        double yv = values(y);
        std::uint64_t used = 1;
        while (used < budget) {
            auto below = [&](std::size_t i) {
                if (is_excluded(i)) return false;
                const double v = values(i);
                return v < yv || (v == yv && i < y);
            };
            SearchOptions so;
            so.cap = budget - used;
            so.growth = options.growth;
            const auto found = grover_search(below, m, backend, rng, so);
            used += found.queries;
            if (!found.index) break;
            y = *found.index;
            yv = values(y);
        }
        total += used;
        if (!have_best || yv < best.value || (yv == best.value && y < best.index)) {
            best.index = y;
            best.value = yv;
            have_best = true;
        }
    }
    // Comparing the boosted candidates costs one value query each.
    if (options.boost > 1) total += options.boost;
    best.queries = total;
    tap.charge(total);
    return best;
}

KthResult kth_smallest(const ValueOracle& values, std::size_t m, std::size_t k, Backend backend, Rng& rng,
                       const MinimumOptions& options, const LedgerTap& tap) {
    if (k == 0 || k > m) throw std::invalid_argument("k must lie in [1, m]");
    std::vector<char> excluded(m, 0);
    KthResult result;
    for (std::size_t r = 0; r < k; ++r) {
        const auto found = quantum_min(values, m, backend, rng, options, {}, &excluded);
        excluded[found.index] = 1;
        result.indices.push_back(found.index);
        result.value = found.value;
        result.queries += found.queries;
    }
    tap.charge(result.queries);
    return result;
}

// ---------------------------------------------------------------------------
// Quantum counting

CountEstimate quantum_count(const IndexPredicate& pred, std::size_t m, unsigned t, Backend backend, Rng& rng,
                            unsigned repeats, const LedgerTap& tap) {
    if (m == 0) throw std::invalid_argument("empty counting domain");
    std::size_t marked = 0;
    for (std::size_t i = 0; i < m; ++i) marked += pred(i) ? 1 : 0;

    AmplitudeProblem problem = AmplitudeProblem::from_probability(static_cast<double>(marked) / static_cast<double>(m));
    if (backend == Backend::exact) {
        qsim::StateVector s(qsim::qubits_for(m));
        qsim::prepare_uniform(s, s.all(), m);
        problem = AmplitudeProblem::from_state(std::move(s), [&pred, m](std::uint64_t b) { return b < m && pred(b); });
    }
    const auto ae = amplitude_estimate(problem, t, backend, rng, repeats, tap);
    CountEstimate c;
    c.estimate = static_cast<double>(m) * ae.a_hat;
    c.count = static_cast<std::size_t>(std::llround(c.estimate));
    c.y = ae.y;
    c.queries = ae.queries;
    return c;
}

double counting_error_bound(std::size_t n, std::size_t m, unsigned t) {
    const double big = std::ldexp(1.0, static_cast<int>(t));
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return 2.0 * std::numbers::pi * std::sqrt(nn * (mm - nn)) / big + std::numbers::pi * std::numbers::pi * mm / (big * big);
}

unsigned counting_qubits_for(std::size_t m, std::size_t n_max, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("counting precision must be positive");
    // sqrt(n (m - n)) peaks at n = m/2.
    const std::size_t n = std::min(n_max, m / 2);
    for (unsigned t = 1; t < 40; ++t) {
        if (counting_error_bound(n, m, t) <= eps) return t;
    }
    throw std::invalid_argument("counting precision unattainable");
}

} // namespace qlof
