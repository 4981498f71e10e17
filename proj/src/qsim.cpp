#include "qlof/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlof/errors.hpp"

namespace qlof::qsim {

namespace {

void check_capacity(unsigned qubits) {
    if (qubits > kMaxQubits) {
        throw CapacityError("state needs " + std::to_string(qubits) + " qubits, simulator capacity is " +
                            std::to_string(kMaxQubits));
    }
}

void check_qubit(const StateVector& s, unsigned q) {
    if (q >= s.qubits()) throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
}

void check_register(const StateVector& s, Register r) {
    if (r.offset + r.width > s.qubits()) throw std::out_of_range("register exceeds state width");
}

} // namespace

unsigned qubits_for(std::uint64_t count) {
    unsigned q = 1;
    while ((std::uint64_t{1} << q) < count) ++q;
    return q;
}

StateVector::StateVector(unsigned qubits) : qubits_(qubits) {
    check_capacity(qubits);
    amps_.assign(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(const std::vector<std::pair<std::string, unsigned>>& registers) : qubits_(0) {
    unsigned offset = 0;
    for (const auto& [name, width] : registers) {
        registers_.emplace_back(name, Register{offset, width});
        offset += width;
    }
    qubits_ = offset;
    check_capacity(qubits_);
    amps_.assign(std::size_t{1} << qubits_, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

Register StateVector::reg(std::string_view name) const {
    for (const auto& [n, r] : registers_) {
        if (n == name) return r;
    }
    throw std::out_of_range("no register named '" + std::string(name) + "'");
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return sum;
}

void StateVector::check_norm() const {
    const double n = norm_squared();
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw std::logic_error("state norm drifted to " + std::to_string(n));
    }
}

double StateVector::probability(const std::function<bool(std::uint64_t)>& pred) const {
    double p = 0.0;
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (pred(b)) p += std::norm(amps_[b]);
    }
    return p;
}

std::vector<double> StateVector::marginal(Register r) const {
    check_register(*this, r);
    std::vector<double> probs(r.dimension(), 0.0);
    for (std::size_t b = 0; b < amps_.size(); ++b) probs[r.extract(b)] += std::norm(amps_[b]);
    return probs;
}

void apply_single(StateVector& s, unsigned qubit, const Matrix2& m) {
    check_qubit(s, qubit);
    auto amps = s.amplitudes();
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t k = base; k < base + stride; ++k) {
            const Amplitude a0 = amps[k];
            const Amplitude a1 = amps[k + stride];
            amps[k] = m[0] * a0 + m[1] * a1;
            amps[k + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void hadamard(StateVector& s, unsigned qubit) {
    const double h = 1.0 / std::numbers::sqrt2;
    apply_single(s, qubit, {h, h, h, -h});
}

void pauli_x(StateVector& s, unsigned qubit) {
    apply_single(s, qubit, {0.0, 1.0, 1.0, 0.0});
}

void controlled_phase(StateVector& s, unsigned control, unsigned target, double angle) {
    check_qubit(s, control);
    check_qubit(s, target);
    const Amplitude phase = std::polar(1.0, angle);
    const std::size_t mask = (std::size_t{1} << control) | (std::size_t{1} << target);
    auto amps = s.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        if ((b & mask) == mask) amps[b] *= phase;
    }
}

void swap_qubits(StateVector& s, unsigned a, unsigned b) {
    check_qubit(s, a);
    check_qubit(s, b);
    if (a == b) return;
    const std::size_t ma = std::size_t{1} << a;
    const std::size_t mb = std::size_t{1} << b;
    auto amps = s.amplitudes();
    for (std::size_t k = 0; k < amps.size(); ++k) {
        if ((k & ma) != 0 && (k & mb) == 0) std::swap(amps[k], amps[(k ^ ma) | mb]);
    }
}

void qft(StateVector& s, Register r, bool inverse) {
    check_register(s, r);
    const unsigned t = r.width;
    auto q = [&](unsigned i) { return r.offset + i; };
    if (!inverse) {
        for (unsigned j = t; j-- > 0;) {
            hadamard(s, q(j));
            for (unsigned k = j; k-- > 0;) {
                controlled_phase(s, q(k), q(j), std::numbers::pi / static_cast<double>(std::uint64_t{1} << (j - k)));
            }
        }
        for (unsigned i = 0; i < t / 2; ++i) swap_qubits(s, q(i), q(t - 1 - i));
    } else {
        for (unsigned i = 0; i < t / 2; ++i) swap_qubits(s, q(i), q(t - 1 - i));
        for (unsigned j = 0; j < t; ++j) {
            for (unsigned k = 0; k < j; ++k) {
                controlled_phase(s, q(k), q(j), -std::numbers::pi / static_cast<double>(std::uint64_t{1} << (j - k)));
            }
            hadamard(s, q(j));
        }
    }
}

void prepare_register(StateVector& s, Register r, std::span<const Amplitude> amps) {
    check_register(s, r);
    if (amps.size() > r.dimension()) throw std::invalid_argument("too many amplitudes for register");
    double norm = 0.0;
    for (const auto& a : amps) norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("prepared amplitudes are not normalized");

    auto v = s.amplitudes();
    std::vector<Amplitude> out(v.size(), Amplitude{0.0, 0.0});
    for (std::size_t b = 0; b < v.size(); ++b) {
        if (v[b] == Amplitude{0.0, 0.0}) continue;
        if ((b & r.mask()) != 0) throw std::logic_error("prepare_register needs the register in |0>");
        for (std::size_t x = 0; x < amps.size(); ++x) out[b | r.place(x)] += v[b] * amps[x];
    }
    std::copy(out.begin(), out.end(), v.begin());
}

void prepare_uniform(StateVector& s, Register r, std::uint64_t count) {
    if (count == 0 || count > r.dimension()) throw std::invalid_argument("uniform count out of register range");
    const double a = 1.0 / std::sqrt(static_cast<double>(count));
    std::vector<Amplitude> amps(count, Amplitude{a, 0.0});
    prepare_register(s, r, amps);
}

void apply_oracle(StateVector& s, const std::function<std::uint64_t(std::uint64_t)>& f, Register in, Register out) {
    check_register(s, in);
    check_register(s, out);
    if (in.overlaps(out)) throw std::invalid_argument("oracle input and output registers overlap");
    auto v = s.amplitudes();
    std::vector<Amplitude> next(v.size(), Amplitude{0.0, 0.0});
    // f is evaluated once per input label.
    std::vector<std::uint64_t> cache(in.dimension());
    std::vector<char> known(in.dimension(), 0);
    for (std::size_t b = 0; b < v.size(); ++b) {
        const std::uint64_t a = in.extract(b);
        if (!known[a]) {
            cache[a] = f(a);
            if (cache[a] >= out.dimension()) throw std::invalid_argument("oracle output wider than its register");
            known[a] = 1;
        }
        const std::uint64_t target = (b & ~out.mask()) | out.place(out.extract(b) ^ cache[a]);
        next[target] = v[b];
    }
    std::copy(next.begin(), next.end(), v.begin());
}

void controlled_value_rotation(StateVector& s, Register value_reg, unsigned ancilla, double scale,
                               const std::function<double(std::uint64_t)>& decode, RotationMode mode) {
    check_register(s, value_reg);
    check_qubit(s, ancilla);
    if (value_reg.overlaps(Register{ancilla, 1})) throw std::invalid_argument("ancilla lies inside the value register");
    if (!(scale > 0.0)) throw std::invalid_argument("rotation scale must be positive");

    const std::size_t anc = std::size_t{1} << ancilla;
    auto v = s.amplitudes();
    std::vector<double> ratio(value_reg.dimension(), 0.0);
    std::vector<char> known(value_reg.dimension(), 0);
    for (std::size_t b = 0; b < v.size(); ++b) {
        if ((b & anc) != 0 && std::norm(v[b]) > 0.0) throw std::logic_error("rotation ancilla is not |0>");
    }
    for (std::size_t b = 0; b < v.size(); ++b) {
        if ((b & anc) != 0 || v[b] == Amplitude{0.0, 0.0}) continue;
        const std::uint64_t label = value_reg.extract(b);
        if (!known[label]) {
            const double value = decode(label);
            const double r = value / scale;
            if (mode == RotationMode::linear) {
                if (std::abs(r) > 1.0 + 1e-12) throw std::domain_error("rotation value exceeds its scale");
                ratio[label] = std::clamp(r, -1.0, 1.0);
            } else {
                if (r < -1e-12 || r > 1.0 + 1e-12) throw std::domain_error("sqrt rotation value outside [0, scale]");
                ratio[label] = std::sqrt(std::clamp(r, 0.0, 1.0));
            }
            known[label] = 1;
        }
        const double c = ratio[label];
        const Amplitude a = v[b];
        v[b] = a * c;
        v[b | anc] = a * std::sqrt(std::max(0.0, 1.0 - c * c));
    }
}

void phase_flip(StateVector& s, const std::function<bool(std::uint64_t)>& pred) {
    auto v = s.amplitudes();
    for (std::size_t b = 0; b < v.size(); ++b) {
        if (pred(b)) v[b] = -v[b];
    }
}

std::vector<std::uint64_t> measure(const StateVector& s, Register r, std::size_t shots, Rng& rng) {
    const auto probs = s.marginal(r);
    std::vector<std::uint64_t> out;
    out.reserve(shots);
    for (std::size_t k = 0; k < shots; ++k) out.push_back(sample_index(probs, rng));
    return out;
}

GroverOperator::GroverOperator(StateVector prepared, std::function<bool(std::uint64_t)> good)
    : psi_(std::move(prepared)), good_(std::move(good)), good_mask_(psi_.dimension(), 0), good_probability_(0.0) {
    psi_.check_norm();
    for (std::size_t b = 0; b < psi_.dimension(); ++b) {
        good_mask_[b] = good_(b) ? 1 : 0;
        if (good_mask_[b]) good_probability_ += std::norm(psi_.amplitudes()[b]);
    }
    good_probability_ = std::clamp(good_probability_, 0.0, 1.0);
}

void GroverOperator::apply(std::span<Amplitude> v) const {
    if (v.size() != psi_.dimension()) throw std::invalid_argument("Grover operator applied to a state of wrong size");
    const auto psi = psi_.amplitudes();
    Amplitude overlap{0.0, 0.0};
    for (std::size_t b = 0; b < v.size(); ++b) {
        if (good_mask_[b]) v[b] = -v[b];
        overlap += std::conj(psi[b]) * v[b];
    }
    for (std::size_t b = 0; b < v.size(); ++b) v[b] = 2.0 * overlap * psi[b] - v[b];
}

std::vector<double> phase_estimation_distribution(const UnitaryApply& u, unsigned t, const StateVector& s) {
    if (t == 0) throw std::invalid_argument("phase estimation needs at least one counting qubit");
    check_capacity(t + s.qubits());
    StateVector joint(t + s.qubits());
    auto amps = joint.amplitudes();
    const std::size_t work_dim = s.dimension();
    const std::size_t rounds = std::size_t{1} << t;
    const double norm = 1.0 / std::sqrt(static_cast<double>(rounds));

    std::vector<Amplitude> current(s.amplitudes().begin(), s.amplitudes().end());
    for (std::size_t c = 0; c < rounds; ++c) {
        if (c > 0) u(current);
        for (std::size_t w = 0; w < work_dim; ++w) amps[(c * work_dim) + w] = current[w] * norm;
    }
    const Register counting{s.qubits(), t};
    qft(joint, counting, /*inverse=*/true);
    joint.check_norm();
    return joint.marginal(counting);
}

PhaseEstimate phase_estimate(const UnitaryApply& u, unsigned t, const StateVector& s, std::size_t shots, Rng& rng) {
    if (shots == 0) throw std::invalid_argument("shots must be >= 1");
    const auto probs = phase_estimation_distribution(u, t, s);
    PhaseEstimate result;
    result.outcomes.reserve(shots);
    for (std::size_t k = 0; k < shots; ++k) result.outcomes.push_back(sample_index(probs, rng));
    result.applications = static_cast<std::uint64_t>(shots) * ((std::uint64_t{1} << t) - 1);
    return result;
}

double phase_kernel(double turns, std::uint64_t y, unsigned t) {
    const double n = std::ldexp(1.0, static_cast<int>(t));
    double delta = turns - static_cast<double>(y) / n;
    delta -= std::round(delta);
    const double x = std::numbers::pi * delta;
    if (std::abs(std::sin(x)) < 1e-15) return 1.0;
    const double num = std::sin(n * x);
    const double den = n * std::sin(x);
    return (num * num) / (den * den);
}

std::vector<double> amplitude_estimation_distribution(double theta, unsigned t) {
    const std::size_t n = std::size_t{1} << t;
    const double turns = theta / std::numbers::pi;
    std::vector<double> probs(n);
    for (std::size_t y = 0; y < n; ++y) {
        probs[y] = 0.5 * (phase_kernel(turns, y, t) + phase_kernel(-turns, y, t));
    }
    return probs;
}

} // namespace qlof::qsim
