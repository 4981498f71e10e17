#include "qlof/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qlof/errors.hpp"
#include "qlof/parallel.hpp"

namespace qlof {

namespace {

// Independent RNG streams per pipeline stage.
enum Stream : std::uint64_t { kStep1 = 1, kStep3 = 3, kFlags = 4 };

MinimumOptions minimum_options(const RunConfig& config) {
    MinimumOptions o;
    o.budget_factor = config.min_budget_factor;
    o.boost = config.min_boost;
    return o;
}

SearchOptions search_options(const RunConfig& config) {
    SearchOptions o;
    o.cap_factor = config.search_cap_factor;
    return o;
}

std::uint64_t ae_block_cost(unsigned t, unsigned repeats) {
    return static_cast<std::uint64_t>(repeats) * ((std::uint64_t{1} << t) - 1);
}

} // namespace

// ---------------------------------------------------------------------------
// Neighbourhoods

double estimate_distance(const Dataset& ds, std::size_t i, std::size_t t, unsigned t1, unsigned repeats,
                         Backend backend, Rng& rng) {
    if (i == t) throw std::invalid_argument("estimate_distance needs two distinct points");
    if (backend == Backend::ledger) {
        const double d = normalized_distance(ds, i, t);
        return std::sin(amplitude_estimate(AmplitudeProblem::from_probability(d * d), t1, backend, rng, repeats).theta_hat);
    }

    // |j> uniform over the n coordinates, then the ancilla rotation
    // conditioned on x_j^i - x_j^t loaded through O_X.
    const QramOracle qram(ds);
    const auto xi = qram.query_row(i);
    const auto xt = qram.query_row(t);
    const std::size_t n = ds.dim();
    qsim::StateVector s({{"j", qsim::qubits_for(n)}, {"anc", 1}});
    const auto j_reg = s.reg("j");
    const unsigned anc = s.reg("anc").offset;
    qsim::prepare_uniform(s, j_reg, n);
    qsim::controlled_value_rotation(
        s, j_reg, anc, ds.c_norm(), [&](std::uint64_t j) { return j < n ? xi[j] - xt[j] : 0.0; },
        qsim::RotationMode::linear);
    const std::uint64_t anc_bit = std::uint64_t{1} << anc;
    auto problem = AmplitudeProblem::from_state(std::move(s), [anc_bit](std::uint64_t b) { return (b & anc_bit) == 0; });
    return std::sin(amplitude_estimate(problem, t1, backend, rng, repeats).theta_hat);
}

double DistanceRow::estimate_for(std::size_t t) const {
    for (std::size_t d = 0; d < others.size(); ++d) {
        if (others[d] == t) return estimates[d];
    }
    throw std::out_of_range("no distance estimate for point " + std::to_string(t));
}

DistanceRow estimate_distances(const Dataset& ds, std::size_t i, const RunConfig& config, Rng& rng) {
    DistanceRow row;
    row.point = i;
    for (std::size_t t = 0; t < ds.size(); ++t) {
        if (t == i) continue;
        row.others.push_back(t);
        row.estimates.push_back(
            estimate_distance(ds, i, t, config.ae_qubits_dist, config.ae_repeats, config.backend, rng));
    }
    return row;
}

double find_k_distance(const DistanceRow& row, const RunConfig& config, Rng& rng, QueryLedger* ledger) {
    const auto result = kth_smallest([&row](std::size_t d) { return row.estimates[d]; }, row.others.size(), config.k,
                                     config.backend, rng, minimum_options(config), {ledger, "step1.q.min"});
    return result.value;
}

bool is_neighbor_estimate(double estimate, double kdist, const RunConfig& config) {
    return estimate <= kdist + config.neighbor_tolerance * config.eps1();
}

NeighborSearch find_neighbors(const DistanceRow& row, double kdist, std::size_t count_hint, const RunConfig& config,
                              Rng& rng, QueryLedger* ledger) {
    const std::size_t domain = row.others.size();
    std::vector<char> found(domain, 0);
    std::size_t found_count = 0;
    std::size_t misses = 0;
    const LedgerTap tap{ledger, "step1.q.grover"};
    for (std::size_t attempt = 0; attempt < config.shots; ++attempt) {
        const auto r = grover_search(
            [&](std::size_t d) { return found[d] == 0 && is_neighbor_estimate(row.estimates[d], kdist, config); },
            domain, config.backend, rng, search_options(config), tap);
        if (r.index) {
            found[*r.index] = 1;
            ++found_count;
            continue;
        }
        if (found_count >= count_hint || misses >= config.neighbor_retry) break;
        ++misses;
    }

    NeighborSearch out;
    for (std::size_t d = 0; d < domain; ++d) {
        if (found[d]) out.neighbors.push_back(row.others[d]);
    }
    // Ambiguous when an estimate other than an exact tie sits within a few
    // eps1 of the threshold.
    const double band = (config.neighbor_tolerance + 2.0) * config.eps1();
    for (double e : row.estimates) {
        if (e != kdist && std::abs(e - kdist) <= band) out.near_threshold = true;
    }
    return out;
}

CountEstimate count_neighbors(const DistanceRow& row, double kdist, const RunConfig& config, Rng& rng,
                              QueryLedger* ledger) {
    return quantum_count([&](std::size_t d) { return is_neighbor_estimate(row.estimates[d], kdist, config); },
                         row.others.size(), config.ae_qubits_count, config.backend, rng, config.ae_repeats,
                         {ledger, "step1.q.count"});
}

std::uint64_t ox_per_distance_query(unsigned t1, unsigned repeats) {
    const std::uint64_t preparer_uses = 2 * ((std::uint64_t{1} << t1) - 1) + 1;
    return static_cast<std::uint64_t>(repeats) * preparer_uses * 2;
}

Step1Result build_neighborhood_table(const Dataset& ds, const RunConfig& config, QueryLedger* ledger) {
    config.validate(ds.size());
    const std::size_t m = ds.size();
    Step1Result result;
    result.table.resize(m);
    result.count_estimates.resize(m);
    result.near_threshold.assign(m, 0);

    std::vector<QueryLedger> local(m);
    parallel_for(m, [&](std::size_t i) {
        Rng rng = make_rng(config.seed, kStep1, i);
        const DistanceRow row = estimate_distances(ds, i, config, rng);
        const double kdist = find_k_distance(row, config, rng, &local[i]);
        const auto count = count_neighbors(row, kdist, config, rng, &local[i]);
        const auto search = find_neighbors(row, kdist, count.count, config, rng, &local[i]);

        auto& out = result.table[i];
        out.kdist = kdist;
        out.neighbors = search.neighbors;
        for (std::size_t t : out.neighbors) out.dists.push_back(row.estimate_for(t));
        result.count_estimates[i] = count.count;
        result.near_threshold[i] = search.near_threshold ? 1 : 0;
    });

    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = result.table[i];
        if (row.count() < config.k) {
            result.warnings.push_back("point " + std::to_string(i) + ": collected " + std::to_string(row.count()) +
                                      " neighbours, fewer than k");
        }
        if (row.count() != result.count_estimates[i]) {
            result.warnings.push_back("point " + std::to_string(i) + ": counted " +
                                      std::to_string(result.count_estimates[i]) + " neighbours, collected " +
                                      std::to_string(row.count()));
        }
        if (result.near_threshold[i]) {
            result.warnings.push_back("point " + std::to_string(i) + ": distance estimate near the k-distance threshold");
        }
    }
    if (ledger != nullptr) {
        QueryLedger merged;
        for (const auto& l : local) merged.merge(l);
        const std::uint64_t queries = merged.total("step1.q.");
        merged.charge("step1.ox", queries * ox_per_distance_query(config.ae_qubits_dist, config.ae_repeats));
        ledger->merge(merged);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Densities

const NeighborhoodRow& NeighborhoodOracles::row(std::size_t i) const {
    if (i >= table_->size()) throw std::out_of_range("neighbourhood table has no row " + std::to_string(i));
    return (*table_)[i];
}

void NeighborhoodOracles::charge(const char* key) const {
    if (ledger_ != nullptr) ledger_->charge(key);
}

std::pair<std::size_t, double> NeighborhoodOracles::U(std::size_t i) const {
    const auto& r = row(i);
    charge("step2.q.U");
    return {r.count(), r.kdist};
}

double NeighborhoodOracles::V(std::size_t i, std::size_t t) const {
    const auto& r = row(i);
    const auto it = std::lower_bound(r.neighbors.begin(), r.neighbors.end(), t);
    if (it == r.neighbors.end() || *it != t) {
        throw std::invalid_argument("V: point " + std::to_string(t) + " is not a neighbour of " + std::to_string(i));
    }
    charge("step2.q.V");
    return r.dists[static_cast<std::size_t>(it - r.neighbors.begin())];
}

std::vector<qsim::Amplitude> NeighborhoodOracles::G(std::size_t i) const {
    const auto& r = row(i);
    if (r.count() == 0) throw std::invalid_argument("G: point " + std::to_string(i) + " has no neighbours");
    charge("step2.q.G");
    const double a = 1.0 / std::sqrt(static_cast<double>(r.count()));
    return std::vector<qsim::Amplitude>(r.count(), qsim::Amplitude{a, 0.0});
}

std::size_t NeighborhoodOracles::W(std::size_t i, std::size_t j) const {
    const auto& r = row(i);
    if (j >= r.count()) throw std::out_of_range("W: neighbour slot " + std::to_string(j) + " out of range");
    charge("step2.q.W");
    return r.neighbors[j];
}

FixedPoint fixed_reach_dist(const NeighborhoodOracles& oracles, std::size_t i, std::size_t j, FixedFormat format) {
    const std::size_t t = oracles.W(i, j);
    const double kd_t = oracles.U(t).second;
    const double d = oracles.V(i, t);
    return q_max(FixedPoint::encode(kd_t, format), FixedPoint::encode(d, format));
}

FixedPoint fixed_inverse_lrd(const NeighborhoodOracles& oracles, std::size_t i, FixedFormat format) {
    const std::size_t n_i = oracles.U(i).first;
    if (n_i == 0) throw DegenerateDataError("point " + std::to_string(i) + " has an empty neighbourhood");
    const FixedFormat wide = format.doubled();
    const FixedPoint one = FixedPoint::encode(1.0, format);
    FixedPoint acc = FixedPoint::encode(0.0, wide);
    for (std::size_t j = 0; j < n_i; ++j) {
        const FixedPoint next = q_mul_add(fixed_reach_dist(oracles, i, j, format), one, acc);
        if (next.bits() < acc.bits()) throw std::overflow_error("reachability sum overflows " + wide.to_string());
        acc = next;
    }
    const FixedPoint count = FixedPoint::encode(static_cast<double>(n_i), wide);
    return q_div(acc, count, format);
}

DensityTable compute_lrd_all(const NeighborhoodTable& table, FixedFormat format, QueryLedger* ledger) {
    format.validate();
    const NeighborhoodOracles oracles(table);
    DensityTable out;
    out.format = format;
    const std::size_t m = table.size();
    out.inverse_lrd.resize(m);
    out.reach.resize(m);
    out.neighbor_inverse_lrd.resize(m);

    // Own densities and reachability distances.
    for (std::size_t i = 0; i < m; ++i) {
        out.inverse_lrd[i] = fixed_inverse_lrd(oracles, i, format);
        if (out.inverse_lrd[i].bits() == 0) {
            throw DegenerateDataError("point " + std::to_string(i) + ": mean reachability distance rounds to zero in " +
                                      format.to_string());
        }
        for (std::size_t j = 0; j < table[i].count(); ++j) {
            out.reach[i].push_back(fixed_reach_dist(oracles, i, j, format));
        }
    }
    // Neighbour densities, addressed through W(i, j).
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < table[i].count(); ++j) {
            out.neighbor_inverse_lrd[i].push_back(fixed_inverse_lrd(oracles, oracles.W(i, j), format));
        }
    }

    if (ledger != nullptr) {
        // Coherent cost: the branches over i run in superposition, so each
        // map is charged once per step with max n_i register slots.
        std::uint64_t max_n = 0;
        for (const auto& r : table) max_n = std::max<std::uint64_t>(max_n, r.count());
        ledger->charge("step2.q.U", 2);
        ledger->charge("step2.q.W", 2);
        ledger->charge("step2.q.V", 2);
        ledger->charge("step2.q.G", 1);
        ledger->charge("step2.q.Uf", 2 * max_n);
        ledger->charge("step2.q.QMA", 2 * max_n);
        ledger->charge("step2.q.DIV", 2);
        const std::uint64_t w = format.width;
        ledger->charge("step2.gates", 2 * max_n * w * w + (2 * max_n + 2) * w * w * w);
    }
    return out;
}

std::optional<bool> spot_check_step2(const NeighborhoodTable& table, const DensityTable& densities, std::size_t i) {
    if (i >= table.size()) throw std::out_of_range("spot check point out of range");
    const std::size_t n_i = table[i].count();
    const unsigned slot_qubits = qsim::qubits_for(n_i);
    const unsigned width = densities.format.width;
    if (slot_qubits + width > qsim::kMaxQubits) return std::nullopt;

    const NeighborhoodOracles oracles(table);
    qsim::StateVector s({{"j", slot_qubits}, {"reach", width}});
    const auto j_reg = s.reg("j");
    const auto out_reg = s.reg("reach");
    const auto g = oracles.G(i);
    qsim::prepare_register(s, j_reg, g);
    const std::vector<qsim::Amplitude> before(s.amplitudes().begin(), s.amplitudes().end());

    auto reach_bits = [&](std::uint64_t j) -> std::uint64_t {
        return j < n_i ? fixed_reach_dist(oracles, i, j, densities.format).bits() : 0;
    };
    qsim::apply_oracle(s, reach_bits, j_reg, out_reg);
    s.check_norm();

    bool ok = true;
    const auto amps = s.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        if (std::norm(amps[b]) < 1e-20) continue;
        const std::uint64_t j = j_reg.extract(b);
        ok = ok && j < n_i && out_reg.extract(b) == densities.reach[i][j].bits();
    }
    qsim::apply_oracle(s, reach_bits, j_reg, out_reg);
    for (std::size_t b = 0; b < amps.size(); ++b) ok = ok && std::abs(s.amplitudes()[b] - before[b]) < 1e-12;
    return ok;
}

// ---------------------------------------------------------------------------
// LOF estimation

LofEstimates compute_lof_all(const NeighborhoodTable& table, const DensityTable& densities, unsigned t3, double E,
                             const RunConfig& config, QueryLedger* ledger) {
    if (t3 < 1) throw std::invalid_argument("t3 must be >= 1");
    if (!(E >= 1.0) || !std::isfinite(E)) throw std::invalid_argument("E must be >= 1");
    const std::size_t m = table.size();
    LofEstimates out;
    out.E = E;
    out.ratios.resize(m);
    out.amplitude.resize(m);
    out.exact_amplitude.resize(m);
    out.lof.resize(m);

    // rho_i^t = [lrd(x^i)]^-1 / [lrd(x^t)]^-1 in fixed point.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < table[i].count(); ++j) {
            double rho = 0.0;
            try {
                rho = q_div(densities.inverse_lrd[i], densities.neighbor_inverse_lrd[i][j]).decode();
            } catch (const std::overflow_error&) {
                const FixedFormat f = densities.inverse_lrd[i].format();
                throw ConfigError("density ratio at point " + std::to_string(i) + " overflows " + f.to_string() +
                                  "; raise --fp-width or lower --fp-frac");
            }
            if (rho > E * (1.0 + 1e-12)) {
                throw RatioBoundError("density ratio " + std::to_string(rho) + " at point " + std::to_string(i) +
                                      " exceeds E = " + std::to_string(E));
            }
            out.ratios[i].push_back(rho);
        }
    }

    parallel_for(m, [&](std::size_t i) {
        Rng rng = make_rng(config.seed, kStep3, i);
        const auto& rhos = out.ratios[i];
        const std::size_t n_i = rhos.size();
        out.exact_amplitude[i] = ordered_sum(rhos) / (static_cast<double>(n_i) * E);

        AmplitudeProblem problem = AmplitudeProblem::from_probability(std::min(1.0, out.exact_amplitude[i]));
        if (config.backend == Backend::exact) {
            qsim::StateVector s({{"j", qsim::qubits_for(n_i)}, {"anc", 1}});
            const auto j_reg = s.reg("j");
            const unsigned anc = s.reg("anc").offset;
            qsim::prepare_uniform(s, j_reg, n_i);
            qsim::controlled_value_rotation(
                s, j_reg, anc, E, [&](std::uint64_t j) { return j < n_i ? std::min(rhos[j], E) : 0.0; },
                qsim::RotationMode::sqrt);
            const std::uint64_t anc_bit = std::uint64_t{1} << anc;
            problem = AmplitudeProblem::from_state(std::move(s), [anc_bit](std::uint64_t b) { return (b & anc_bit) == 0; });
        }
        const auto est = amplitude_estimate(problem, t3, config.backend, rng, config.ae_repeats);
        out.amplitude[i] = est.a_hat;
        out.lof[i] = E * est.a_hat;
    });

    if (ledger != nullptr) {
        std::uint64_t max_n = 0;
        for (const auto& r : table) max_n = std::max<std::uint64_t>(max_n, r.count());
        ledger->charge("step3.q.ratio", max_n);
        ledger->charge("step3.q.ae", ae_block_cost(t3, config.ae_repeats));
    }
    return out;
}

FlagResult flag_anomalies(const std::vector<double>& lofs, double delta, Backend backend, Rng& rng,
                          const SearchOptions& options, QueryLedger* ledger) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const std::size_t m = lofs.size();
    std::vector<char> found(m, 0);
    FlagResult out;
    const LedgerTap tap{ledger, "step3.q.grover"};
    while (true) {
        const auto r = grover_search([&](std::size_t i) { return found[i] == 0 && lofs[i] >= delta; }, m, backend, rng,
                                     options, tap);
        out.queries += r.queries;
        if (!r.index) break;
        found[*r.index] = 1;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (found[i]) out.indices.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Error budget

double half_neighborhood_constant(const NeighborhoodTable& table) {
    double root_p = std::numeric_limits<double>::infinity();
    for (const auto& row : table) {
        if (row.count() == 0) continue;
        std::vector<double> d(row.dists);
        std::sort(d.begin(), d.end(), std::greater<>());
        // At least ceil(n/2) values must be >= sqrt(P).
        const std::size_t half = (row.count() + 1) / 2;
        root_p = std::min(root_p, d[half - 1]);
    }
    if (!std::isfinite(root_p)) return 0.0;
    return root_p * root_p;
}

ErrorBudget error_budget(const RunConfig& config, const ClassicalLof& oracle) {
    ErrorBudget b;
    b.eps1 = config.eps1();
    b.eps3 = config.eps3();
    const std::size_t domain = oracle.size() - 1;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        b.eps2 = std::max(b.eps2, counting_error_bound(oracle.row(i).count(), domain, config.ae_qubits_count));
    }
    b.max_ratio = 0.0;
    double max_lof = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        for (std::size_t t : oracle.row(i).neighbors) b.max_ratio = std::max(b.max_ratio, oracle.lrd(t) / oracle.lrd(i));
        max_lof = std::max(max_lof, oracle.lof(i));
    }
    b.E = config.e_safety * b.max_ratio;
    b.P = half_neighborhood_constant(oracle.table());
    b.total_bound = b.P > 0.0 ? b.E * b.eps3 + 8.0 * b.eps1 / b.P : std::numeric_limits<double>::infinity();
    b.vacuous = b.total_bound > max_lof;
    return b;
}

ErrorBudget error_budget(const RunConfig& config, const Dataset& ds) {
    return error_budget(config, ClassicalLof(ds, config.k));
}

// ---------------------------------------------------------------------------
// End to end

QlofRun run_qlof(const Dataset& ds, const RunConfig& config) {
    config.validate(ds.size());
    QlofRun run;
    run.config = config;
    const ClassicalLof advice(ds, config.k);
    run.budget = error_budget(config, advice);

    run.step1 = build_neighborhood_table(ds, config, &run.ledger);
    run.warnings = run.step1.warnings;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (run.step1.table[i].count() == 0) {
            throw DegenerateDataError("point " + std::to_string(i) + ": no neighbours were collected");
        }
    }

    run.densities = compute_lrd_all(run.step1.table, config.fixed_format(), &run.ledger);
    if (config.backend == Backend::exact) run.step2_spot_check = spot_check_step2(run.step1.table, run.densities, 0);

    run.lofs = compute_lof_all(run.step1.table, run.densities, config.ae_qubits_lof, run.budget.E, config, &run.ledger);

    Rng rng = make_rng(config.seed, kFlags, 0);
    run.flags = flag_anomalies(run.lofs.lof, config.delta, config.backend, rng, search_options(config), &run.ledger);
    run.ledger.charge("step3.cost", run.ledger.get("step3.q.grover") * ae_block_cost(config.ae_qubits_lof, config.ae_repeats));
    return run;
}

Comparison compare(const Dataset& ds, const RunConfig& config) {
    Comparison c;
    c.quantum = run_qlof(ds, config);
    c.classical = flag(ds, config.k, config.delta);
    c.flags_match = c.classical.flagged_indices() == c.quantum.flags.indices;

    const double bound = c.quantum.budget.total_bound;
    c.margin_ok = true;
    c.all_within_bound = true;
    for (const auto& p : c.classical.points) {
        if (std::abs(p.lof - config.delta) <= bound) {
            c.margin_ok = false;
            c.near_threshold_points.push_back(p.index);
        }
        const double err = std::abs(c.quantum.lofs.lof[p.index] - p.lof);
        c.max_lof_error = std::max(c.max_lof_error, err);
        if (err > bound) c.all_within_bound = false;
    }
    if (!c.near_threshold_points.empty()) {
        c.quantum.warnings.push_back(std::to_string(c.near_threshold_points.size()) +
                                     " point(s) have a classical LOF within the error bound of delta");
    }
    return c;
}

} // namespace qlof
