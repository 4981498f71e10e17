#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlof/config.hpp"

namespace qlof {

struct ScaleRow {
    std::size_t m = 0;
    std::string step;
    double median = 0.0; // median query count over trials
};

struct ScaleOptions {
    std::vector<std::size_t> grid{8, 16, 32, 64};
    std::vector<std::size_t> primitive_grid{16, 64, 256, 1024};
    std::size_t dim = 2;
    double contamination = 0.1;
    std::size_t trials = 5;
    double count_eps = 0.5;          // counting precision target when picking ae_qubits_count
    std::optional<double> delta;     // default: midway between the two largest LOFs
    RunConfig base;                  // backend is forced to ledger
};

/// Full detector runs on synthetic clusters. Steps reported:
/// step1 (all neighbourhood-stage queries), step2, step3.ae, step3.grover.
std::vector<ScaleRow> pipeline_scaling(const ScaleOptions& options);

/// Single-solution grover_search and quantum_min over random values.
/// Steps reported: grover_search, quantum_min.
std::vector<ScaleRow> primitive_scaling(const ScaleOptions& options);

/// Least-squares slope of log(median) against log(m) for one step. Needs at
/// least two distinct m values with positive medians.
std::optional<double> fit_exponent(const std::vector<ScaleRow>& rows, const std::string& step);

std::string scale_csv(const std::vector<ScaleRow>& rows);

struct CalibrationRow {
    double a_true = 0.0;
    unsigned t = 0;
    std::size_t trials = 0;
    std::size_t within = 0; // runs with |theta - theta_hat| <= pi / 2^t

    double fraction() const noexcept { return trials == 0 ? 0.0 : static_cast<double>(within) / static_cast<double>(trials); }
};

struct CalibrationOptions {
    std::size_t amplitudes = 200;
    std::vector<unsigned> precisions{4, 6, 8};
    std::size_t trials = 10; // estimation runs per amplitude
    bool include_endpoints = true; // extra rows for a = 0 and a = 1
    std::uint64_t seed = 1;
};

/// Single-run amplitude estimation on the statevector backend.
std::vector<CalibrationRow> calibrate_ae(const CalibrationOptions& options);

/// Pooled fraction over the random amplitudes (endpoint rows excluded) for one t.
CalibrationRow pooled(const std::vector<CalibrationRow>& rows, unsigned t, bool include_endpoints = false);

std::string calibration_csv(const std::vector<CalibrationRow>& rows);

} // namespace qlof
