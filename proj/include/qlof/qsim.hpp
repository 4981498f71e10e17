#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qlof/random.hpp"

/// Dense statevector simulator. Qubit 0 is the least significant bit of a
/// basis label; registers are contiguous qubit spans.
namespace qlof::qsim {

using Amplitude = std::complex<double>;

/// Hard ceiling on simulated qubits (2^20 amplitudes, 16 MiB).
inline constexpr unsigned kMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;

struct Register {
    unsigned offset = 0;
    unsigned width = 0;

    std::uint64_t dimension() const noexcept { return std::uint64_t{1} << width; }
    std::uint64_t mask() const noexcept { return (dimension() - 1) << offset; }
    std::uint64_t extract(std::uint64_t basis) const noexcept { return (basis >> offset) & (dimension() - 1); }
    std::uint64_t place(std::uint64_t value) const noexcept { return (value & (dimension() - 1)) << offset; }
    bool overlaps(const Register& other) const noexcept {
        return width != 0 && other.width != 0 && offset < other.offset + other.width &&
               other.offset < offset + width;
    }
};

/// Number of qubits needed to label `count` basis states (at least one).
unsigned qubits_for(std::uint64_t count);

class StateVector {
public:
    /// |0...0> on `qubits` qubits. Throws CapacityError above kMaxQubits.
    explicit StateVector(unsigned qubits);
    /// Named registers laid out from qubit 0 upward in the given order.
    explicit StateVector(const std::vector<std::pair<std::string, unsigned>>& registers);

    unsigned qubits() const noexcept { return qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    Register reg(std::string_view name) const;
    Register all() const noexcept { return {0, qubits_}; }

    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    std::span<Amplitude> amplitudes() noexcept { return amps_; }

    double norm_squared() const;
    /// Throws std::logic_error when the norm drifted more than kNormTolerance.
    void check_norm() const;
    /// Total probability of basis labels satisfying `pred`.
    double probability(const std::function<bool(std::uint64_t)>& pred) const;
    /// Marginal distribution of one register.
    std::vector<double> marginal(Register r) const;

private:
    unsigned qubits_;
    std::vector<Amplitude> amps_;
    std::vector<std::pair<std::string, Register>> registers_;
};

using Matrix2 = std::array<Amplitude, 4>; // row-major

void apply_single(StateVector& s, unsigned qubit, const Matrix2& m);
void hadamard(StateVector& s, unsigned qubit);
void pauli_x(StateVector& s, unsigned qubit);
void controlled_phase(StateVector& s, unsigned control, unsigned target, double angle);
void swap_qubits(StateVector& s, unsigned a, unsigned b);

/// Textbook QFT circuit (Hadamards, controlled phases, final swaps) on a
/// register; `inverse` runs the adjoint circuit.
void qft(StateVector& s, Register r, bool inverse = false);

/// State-preparer: loads `amps` (normalized, length <= 2^width) into a
/// register that must be |0> in every branch.
void prepare_register(StateVector& s, Register r, std::span<const Amplitude> amps);
/// Uniform superposition over the first `count` labels of a |0> register.
void prepare_uniform(StateVector& s, Register r, std::uint64_t count);

/// Permutation unitary |a>|b> -> |a>|b XOR f(a)> with a read from `in` and
/// b from `out`. `in` may be empty (f then sees 0). Throws
/// std::invalid_argument when the registers overlap.
void apply_oracle(StateVector& s, const std::function<std::uint64_t(std::uint64_t)>& f, Register in, Register out);

enum class RotationMode { linear, sqrt };

/// Rotates `ancilla` from |0> to r|0> + sqrt(1 - r^2)|1> where r = v/scale
/// (linear) or sqrt(v/scale) (sqrt), v = decode(label of value_reg).
/// Throws std::domain_error when |v| > scale (or v < 0 in sqrt mode) on any
/// branch with nonzero amplitude, std::logic_error if the ancilla is not |0>.
void controlled_value_rotation(StateVector& s, Register value_reg, unsigned ancilla, double scale,
                               const std::function<double(std::uint64_t)>& decode,
                               RotationMode mode = RotationMode::linear);

/// Z-type phase oracle: negates amplitudes of basis labels with pred true.
void phase_flip(StateVector& s, const std::function<bool(std::uint64_t)>& pred);

/// i.i.d. samples of one register's measurement outcome.
std::vector<std::uint64_t> measure(const StateVector& s, Register r, std::size_t shots, Rng& rng);

/// Amplitude-amplification operator Q = (2|psi><psi| - I)(I - 2 P_good) for
/// |psi> = A|0>. On span{good, bad} it rotates by 2*theta with
/// sin^2(theta) = <psi|P_good|psi>, so its eigenphases are +-2*theta.
class GroverOperator {
public:
    GroverOperator(StateVector prepared, std::function<bool(std::uint64_t)> good);

    void apply(std::span<Amplitude> v) const;
    void apply(StateVector& s) const { apply(s.amplitudes()); }

    const StateVector& prepared() const noexcept { return psi_; }
    double good_probability() const noexcept { return good_probability_; }
    unsigned qubits() const noexcept { return psi_.qubits(); }
    bool good(std::uint64_t basis) const { return good_(basis); }

private:
    StateVector psi_;
    std::function<bool(std::uint64_t)> good_;
    std::vector<char> good_mask_;
    double good_probability_;
};

using UnitaryApply = std::function<void(std::span<Amplitude>)>;

/// Phase estimation with `t` counting qubits on work state `s`. The joint
/// counting (high) + work (low) state is materialized as
/// 2^{-t/2} sum_c |c> U^c|s>, which costs exactly 2^t - 1 applications of U,
/// followed by the gate-level inverse QFT. Returns the distribution of the
/// counting register. Throws CapacityError when t + qubits exceeds kMaxQubits.
std::vector<double> phase_estimation_distribution(const UnitaryApply& u, unsigned t, const StateVector& s);

struct PhaseEstimate {
    std::vector<std::uint64_t> outcomes;
    std::uint64_t applications = 0; // controlled-U applications charged, all shots
};

PhaseEstimate phase_estimate(const UnitaryApply& u, unsigned t, const StateVector& s, std::size_t shots, Rng& rng);

/// Output law of phase estimation for an eigenstate with phase `turns`
/// (fraction of a full turn): the Fejer kernel
/// |sum_c e^{2 pi i c (turns - y/2^t)}|^2 / 4^t.
double phase_kernel(double turns, std::uint64_t y, unsigned t);

/// Analytic counting-register law of amplitude estimation: |psi> splits
/// evenly over the eigenvectors of Q with phases +-theta/pi turns.
std::vector<double> amplitude_estimation_distribution(double theta, unsigned t);

} // namespace qlof::qsim
