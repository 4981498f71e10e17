#include "qlof/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string_view>

#include <CLI11.hpp>

#include "qlof/config.hpp"
#include "qlof/dataset.hpp"
#include "qlof/errors.hpp"
#include "qlof/experiments.hpp"
#include "qlof/lof_classical.hpp"
#include "qlof/pipeline.hpp"
#include "qlof/report.hpp"

namespace qlof {

LogLevel log_level_from_env() {
    const char* raw = std::getenv("LOG_LEVEL");
    if (raw == nullptr) return LogLevel::warn;
    const std::string_view v(raw);
    if (v == "error") return LogLevel::error;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

namespace {

struct Logger {
    LogLevel level;
    std::ostream& err;

    void warn(const std::string& msg) const {
        if (level >= LogLevel::warn) err << "warning: " << msg << '\n';
    }
    void info(const std::string& msg) const {
        if (level >= LogLevel::info) err << msg << '\n';
    }
};

struct Invocation {
    std::string input;
    std::string out;
    RunConfig config;
    std::string backend = "exact";

    ScaleOptions scale;
    CalibrationOptions calibration;
};

void add_run_options(CLI::App& cmd, Invocation& inv, bool quantum) {
    cmd.add_option("input", inv.input, "CSV file, one point per row")->required();
    cmd.add_option("--k", inv.config.k, "neighbourhood size");
    cmd.add_option("--delta", inv.config.delta, "LOF threshold");
    cmd.add_option("--out", inv.out, "output base path");
    if (!quantum) return;
    cmd.add_option("--backend", inv.backend, "exact or ledger");
    cmd.add_option("--ae-qubits-dist", inv.config.ae_qubits_dist, "precision qubits for distance estimation");
    cmd.add_option("--ae-qubits-count", inv.config.ae_qubits_count, "precision qubits for neighbour counting");
    cmd.add_option("--ae-qubits-lof", inv.config.ae_qubits_lof, "precision qubits for LOF estimation");
    cmd.add_option("--ae-repeats", inv.config.ae_repeats, "odd number of estimates per median");
    cmd.add_option("--fp-width", inv.config.fp_width, "fixed-point register width");
    cmd.add_option("--fp-frac", inv.config.fp_frac, "fixed-point fractional bits");
    cmd.add_option("--shots", inv.config.shots, "cap on neighbour searches per point");
    cmd.add_option("--seed", inv.config.seed, "random seed");
}

void emit(const Invocation& inv, const std::string& suffix, const std::string& content, std::ostream& out) {
    if (inv.out.empty()) {
        out << content;
    } else {
        write_atomic(inv.out + suffix, content);
    }
}

int run_classical(const Invocation& inv, std::ostream& out, const Logger& log) {
    inv.config.validate();
    const Dataset ds = load_csv(inv.input);
    inv.config.validate(ds.size());
    const LofReport report = flag(ds, inv.config.k, inv.config.delta);
    if (inv.out.empty()) {
        out << report_csv(report);
    } else {
        write_atomic(inv.out + ".json", report_json(report, ds));
        write_atomic(inv.out + ".csv", report_csv(report));
    }
    log.info("flagged " + std::to_string(report.flagged_count) + " of " + std::to_string(ds.size()) + " points");
    return kExitOk;
}

int run_quantum(const Invocation& inv, std::ostream& out, const Logger& log) {
    inv.config.validate();
    const Dataset ds = load_csv(inv.input);
    inv.config.validate(ds.size());
    const QlofRun run = run_qlof(ds, inv.config);
    for (const auto& w : run.warnings) log.warn(w);
    if (run.budget.vacuous) log.warn("error bound exceeds the largest LOF; raise the precision settings");
    emit(inv, ".json", run_manifest_json(run, ds), out);
    log.info("flagged " + std::to_string(run.flags.count()) + " of " + std::to_string(ds.size()) + " points");
    return kExitOk;
}

int run_compare(const Invocation& inv, std::ostream& out, const Logger& log) {
    inv.config.validate();
    const Dataset ds = load_csv(inv.input);
    inv.config.validate(ds.size());
    const Comparison cmp = compare(ds, inv.config);
    for (const auto& w : cmp.quantum.warnings) log.warn(w);
    emit(inv, ".json", comparison_manifest_json(cmp, ds), out);
    if (cmp.flags_match) return kExitOk;
    if (!cmp.margin_ok) {
        log.warn("flag sets differ; delta lies inside the error band of some point");
        return kExitNearThreshold;
    }
    log.warn("flag sets differ although every LOF is clear of delta by more than the error bound");
    return kExitContract;
}

int run_scale(Invocation& inv, std::ostream& out, const Logger& log) {
    inv.scale.base = inv.config;
    inv.scale.base.backend = Backend::ledger;
    inv.scale.base.validate();
    if (inv.scale.grid.empty() && inv.scale.primitive_grid.empty()) throw ConfigError("empty m grid");
    for (std::size_t m : inv.scale.grid) {
        if (m < inv.config.k + 1) throw ConfigError("grid value " + std::to_string(m) + " is too small for k");
    }
    if (inv.scale.trials < 1) throw ConfigError("trials must be >= 1");

    std::vector<ScaleRow> rows = pipeline_scaling(inv.scale);
    const auto prim = primitive_scaling(inv.scale);
    rows.insert(rows.end(), prim.begin(), prim.end());
    emit(inv, ".csv", scale_csv(rows), out);

    std::string fits = "step,exponent\n";
    for (const char* step : {"step1", "step2", "step3.ae", "step3.grover", "grover_search", "quantum_min"}) {
        const auto e = fit_exponent(rows, step);
        if (!e) {
            log.warn(std::string("fit refused for ") + step + ": fewer than two grid points");
            continue;
        }
        fits += std::string(step) + ',' + format_double(*e) + '\n';
        log.info(std::string(step) + " exponent " + format_double(*e));
    }
    if (!inv.out.empty()) write_atomic(inv.out + ".fit.csv", fits);
    else out << fits;
    return kExitOk;
}

int run_calibrate(const Invocation& inv, std::ostream& out, const Logger& log) {
    if (inv.calibration.trials < 1) throw ConfigError("trials must be >= 1");
    for (unsigned t : inv.calibration.precisions) {
        if (t < 1 || t > 16) throw ConfigError("precision qubits must lie in [1, 16]");
    }
    CalibrationOptions opts = inv.calibration;
    opts.seed = inv.config.seed;
    const auto rows = calibrate_ae(opts);
    emit(inv, ".csv", calibration_csv(rows), out);
    for (unsigned t : opts.precisions) {
        const auto p = pooled(rows, t);
        log.info("t = " + std::to_string(t) + ": fraction within bound " + format_double(p.fraction()));
    }
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Logger log{log_level_from_env(), err};
    Invocation inv;

    CLI::App app{"Local outlier factor detection, classical and simulated quantum", "qlof"};
    app.require_subcommand(1, 1);
    auto* classical = app.add_subcommand("classical", "brute-force LOF report");
    add_run_options(*classical, inv, false);
    auto* quantum = app.add_subcommand("quantum", "simulated quantum detector");
    add_run_options(*quantum, inv, true);
    auto* cmp = app.add_subcommand("compare", "quantum and classical detectors side by side");
    add_run_options(*cmp, inv, true);

    auto* scale = app.add_subcommand("scale", "query-count scaling on synthetic clusters");
    scale->add_option("--k", inv.config.k, "neighbourhood size");
    scale->add_option("--grid", inv.scale.grid, "dataset sizes for the detector sweep");
    scale->add_option("--primitive-grid", inv.scale.primitive_grid, "domain sizes for the search sweep");
    scale->add_option("--dim", inv.scale.dim, "dimension of the synthetic points");
    scale->add_option("--contamination", inv.scale.contamination, "fraction of planted outliers");
    scale->add_option("--trials", inv.scale.trials, "runs per grid point");
    scale->add_option("--count-eps", inv.scale.count_eps, "counting precision target");
    auto* scale_delta = scale->add_option("--delta", "LOF threshold (default: between the two largest LOFs)");
    scale->add_option("--ae-qubits-dist", inv.config.ae_qubits_dist, "precision qubits for distance estimation");
    scale->add_option("--ae-qubits-lof", inv.config.ae_qubits_lof, "precision qubits for LOF estimation");
    scale->add_option("--fp-width", inv.config.fp_width, "fixed-point register width");
    scale->add_option("--fp-frac", inv.config.fp_frac, "fixed-point fractional bits");
    scale->add_option("--seed", inv.config.seed, "random seed");
    scale->add_option("--out", inv.out, "output base path");

    auto* calib = app.add_subcommand("calibrate-ae", "amplitude-estimation accuracy sweep");
    calib->add_option("--amplitudes", inv.calibration.amplitudes, "random amplitudes to test");
    calib->add_option("--precisions", inv.calibration.precisions, "precision qubit counts");
    calib->add_option("--trials", inv.calibration.trials, "runs per amplitude");
    calib->add_option("--seed", inv.config.seed, "random seed");
    calib->add_option("--out", inv.out, "output base path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        inv.config.backend = parse_backend(inv.backend);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (scale_delta->count() > 0) inv.scale.delta = scale_delta->as<double>();

    try {
        if (classical->parsed()) return run_classical(inv, out, log);
        if (quantum->parsed()) return run_quantum(inv, out, log);
        if (cmp->parsed()) return run_compare(inv, out, log);
        if (scale->parsed()) return run_scale(inv, out, log);
        return run_calibrate(inv, out, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DegenerateDataError& e) {
        err << "degenerate data: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "; rerun with --backend ledger\n";
        return kExitCapacity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitContract;
    }
}

} // namespace qlof
