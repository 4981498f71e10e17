#include "qlof/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qlof/errors.hpp"

namespace qlof {

double RunConfig::eps1() const {
    return std::numbers::pi / std::ldexp(1.0, static_cast<int>(ae_qubits_dist));
}

double RunConfig::eps3() const {
    return std::numbers::pi / std::ldexp(1.0, static_cast<int>(ae_qubits_lof));
}

void RunConfig::validate(std::size_t points) const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (points != 0 && k > points - 1) {
        throw ConfigError("k = " + std::to_string(k) + " exceeds m - 1 = " + std::to_string(points - 1));
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be a positive number");
    if (fp_width < 1 || fp_width > FixedFormat::kMaxConfigWidth) throw ConfigError("fp-width must lie in [1, 32]");
    if (fp_frac >= fp_width) throw ConfigError("fp-frac must be smaller than fp-width");
    if (ae_qubits_dist < 1 || ae_qubits_count < 1 || ae_qubits_lof < 1) {
        throw ConfigError("amplitude-estimation qubit counts must be >= 1");
    }
    if (ae_qubits_dist > 16 || ae_qubits_count > 16 || ae_qubits_lof > 16) {
        throw ConfigError("amplitude-estimation qubit counts above 16 are not supported");
    }
    if (ae_repeats == 0 || ae_repeats % 2 == 0) throw ConfigError("ae-repeats must be odd");
    if (shots < 1) throw ConfigError("shots must be >= 1");
    if (!(e_safety >= 1.0)) throw ConfigError("E safety factor must be >= 1");
    if (!(neighbor_tolerance >= 0.0)) throw ConfigError("neighbour tolerance must be >= 0");
    if (min_boost < 1) throw ConfigError("minimum-search boost must be >= 1");
    if (!(min_budget_factor > 0.0) || !(search_cap_factor > 0.0)) throw ConfigError("search budgets must be positive");
}

} // namespace qlof
