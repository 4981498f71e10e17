#include "qlof/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qlof/lof_classical.hpp"
#include "qlof/pipeline.hpp"
#include "qlof/primitives.hpp"
#include "qlof/random.hpp"
#include "qlof/report.hpp"
#include "qlof/synthetic.hpp"

namespace qlof {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Add integer bits until density ratios up to E fit; fractional bits are kept.
void widen_for_ratios(RunConfig& config, const ClassicalLof& classical) {
    const double E = error_budget(config, classical).E;
    const auto int_bits = static_cast<unsigned>(std::floor(std::log2(E))) + 1;
    const unsigned need = std::min(config.fp_frac + int_bits, FixedFormat::kMaxConfigWidth);
    config.fp_width = std::max(config.fp_width, need);
}

double top_two_midpoint(const std::vector<double>& lofs) {
    std::vector<double> s(lofs);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s.size() < 2 ? s.front() : 0.5 * (s[0] + s[1]);
}

} // namespace

std::vector<ScaleRow> pipeline_scaling(const ScaleOptions& options) {
    std::vector<ScaleRow> rows;
    const char* steps[] = {"step1", "step2", "step3.ae", "step3.grover"};
    for (std::size_t m : options.grid) {
        std::map<std::string, std::vector<double>> samples;
        for (std::size_t trial = 0; trial < options.trials; ++trial) {
            ClusterSpec spec;
            spec.points = m;
            spec.dim = options.dim;
            spec.contamination = options.contamination;
            spec.seed = options.base.seed * 1000003 + trial;
            const auto synth = gaussian_clusters(spec);

            RunConfig config = options.base;
            config.backend = Backend::ledger;
            config.seed = spec.seed;
            config.ae_qubits_count = counting_qubits_for(m - 1, config.k, options.count_eps);
            const ClassicalLof classical(synth.data, config.k);
            config.delta = options.delta ? *options.delta : top_two_midpoint(classical.lofs());
            widen_for_ratios(config, classical);

            const QlofRun run = run_qlof(synth.data, config);
            samples["step1"].push_back(static_cast<double>(run.ledger.total("step1.q.")));
            samples["step2"].push_back(static_cast<double>(run.ledger.total("step2.q.")));
            samples["step3.ae"].push_back(static_cast<double>(run.ledger.get("step3.q.ae")));
            samples["step3.grover"].push_back(static_cast<double>(run.ledger.get("step3.q.grover")));
        }
        for (const char* step : steps) rows.push_back({m, step, median(samples[step])});
    }
    return rows;
}

std::vector<ScaleRow> primitive_scaling(const ScaleOptions& options) {
    std::vector<ScaleRow> rows;
    for (std::size_t m : options.primitive_grid) {
        std::vector<double> search, minimum;
        for (std::size_t trial = 0; trial < options.trials; ++trial) {
            Rng rng = make_rng(options.base.seed, 0x7a, m * 1000 + trial);
            const std::size_t marked = uniform_below(rng, m);
            const auto found = grover_search([marked](std::size_t i) { return i == marked; }, m, Backend::ledger, rng);
            search.push_back(static_cast<double>(found.queries));

            std::vector<double> values(m);
            for (double& v : values) v = uniform01(rng);
            MinimumOptions mo;
            mo.budget_factor = options.base.min_budget_factor;
            const auto best = quantum_min([&values](std::size_t i) { return values[i]; }, m, Backend::ledger, rng, mo);
            minimum.push_back(static_cast<double>(best.queries));
        }
        rows.push_back({m, "grover_search", median(search)});
        rows.push_back({m, "quantum_min", median(minimum)});
    }
    return rows;
}

std::optional<double> fit_exponent(const std::vector<ScaleRow>& rows, const std::string& step) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.step != step || r.median <= 0.0 || r.m == 0) continue;
        xs.push_back(std::log(static_cast<double>(r.m)));
        ys.push_back(std::log(r.median));
    }
    if (xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

std::string scale_csv(const std::vector<ScaleRow>& rows) {
    std::string out = "m,step,median_queries\n";
    for (const auto& r : rows) out += std::to_string(r.m) + ',' + r.step + ',' + format_double(r.median) + '\n';
    return out;
}

std::vector<CalibrationRow> calibrate_ae(const CalibrationOptions& options) {
    std::vector<double> amps;
    Rng pick = make_rng(options.seed, 0x7c, 0);
    for (std::size_t a = 0; a < options.amplitudes; ++a) amps.push_back(uniform01(pick));
    if (options.include_endpoints) {
        amps.push_back(0.0);
        amps.push_back(1.0);
    }

    std::vector<CalibrationRow> rows;
    for (unsigned t : options.precisions) {
        for (std::size_t a = 0; a < amps.size(); ++a) {
            Rng rng = make_rng(options.seed, 0x7d + t, a);
            const auto problem = AmplitudeProblem::from_probability(amps[a]);
            const double theta = std::asin(std::sqrt(amps[a]));
            CalibrationRow row{amps[a], t, options.trials, 0};
            for (std::size_t trial = 0; trial < options.trials; ++trial) {
                const auto est = amplitude_estimate(problem, t, Backend::exact, rng);
                if (std::abs(est.theta_hat - theta) <= std::numbers::pi / std::ldexp(1.0, static_cast<int>(t)) + 1e-12) {
                    ++row.within;
                }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

CalibrationRow pooled(const std::vector<CalibrationRow>& rows, unsigned t, bool include_endpoints) {
    CalibrationRow out{0.0, t, 0, 0};
    for (const auto& r : rows) {
        if (r.t != t) continue;
        if (!include_endpoints && (r.a_true == 0.0 || r.a_true == 1.0)) continue;
        out.trials += r.trials;
        out.within += r.within;
    }
    return out;
}

std::string calibration_csv(const std::vector<CalibrationRow>& rows) {
    std::string out = "a_true,t,trials,within,fraction\n";
    for (const auto& r : rows) {
        out += format_double(r.a_true) + ',' + std::to_string(r.t) + ',' + std::to_string(r.trials) + ',' +
               std::to_string(r.within) + ',' + format_double(r.fraction()) + '\n';
    }
    return out;
}

} // namespace qlof
