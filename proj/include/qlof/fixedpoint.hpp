#pragma once

#include <cstdint>
#include <string>

namespace qlof {

/// Register layout of an unsigned fixed-point word: `width` qubits, the low
/// `frac` of which are fractional. Words up to 64 bits; run configurations stop
/// at 32 so the doubled multiply-adder format still fits.
struct FixedFormat {
    unsigned width = 16;
    unsigned frac = 12;

    static constexpr unsigned kMaxWidth = 64;
    static constexpr unsigned kMaxConfigWidth = 32;

    /// Throws std::invalid_argument unless 1 <= width <= 64 and frac < width.
    void validate() const;
    FixedFormat doubled() const { return {2 * width, 2 * frac}; }
    std::uint64_t modulus_mask() const;
    /// Largest representable value, (2^w - 1) / 2^f.
    double max_value() const;
    std::string to_string() const;

    friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

/// Unsigned fixed-point value as held in a quantum register: value = bits / 2^frac,
/// arithmetic wraps modulo 2^width.
class FixedPoint {
public:
    FixedPoint() = default;

    /// Round-half-to-even encoding of v in [0, 2^{w-f}). Throws
    /// std::overflow_error when v does not fit and std::domain_error when v < 0.
    static FixedPoint encode(double v, FixedFormat format);
    static FixedPoint from_bits(std::uint64_t bits, FixedFormat format);

    std::uint64_t bits() const noexcept { return bits_; }
    FixedFormat format() const noexcept { return format_; }
    double decode() const;

    friend bool operator==(const FixedPoint&, const FixedPoint&) = default;

private:
    FixedPoint(std::uint64_t bits, FixedFormat format) : bits_(bits), format_(format) {}

    std::uint64_t bits_ = 0;
    FixedFormat format_{};
};

/// Quantum adder |x>|y>|0> -> |x>|y>|x+y>: (x + y) mod 2^w.
FixedPoint q_add(const FixedPoint& x, const FixedPoint& y);

/// Quantum multiply-adder |x>|y>|z> -> |x>|y>|z + x*y>. x and y share (w, f);
/// z must be in the doubled (2w, 2f) format. Exact modulo 2^{2w}.
FixedPoint q_mul_add(const FixedPoint& x, const FixedPoint& y, const FixedPoint& z);

/// U_f with f(a, b) = max{a, b} by unsigned comparison; ties return a.
FixedPoint q_max(const FixedPoint& a, const FixedPoint& b);

/// round(num / den) in `out` format by restoring long division on the bit
/// patterns, ties to even. num and den share a format. Throws
/// std::domain_error on a zero denominator and std::overflow_error when the
/// quotient does not fit `out`.
FixedPoint q_div(const FixedPoint& num, const FixedPoint& den, FixedFormat out);
inline FixedPoint q_div(const FixedPoint& num, const FixedPoint& den) { return q_div(num, den, num.format()); }

/// Re-expresses a value in another format, rounding half to even when
/// fractional bits are dropped. Throws std::overflow_error when it does not fit.
FixedPoint q_convert(const FixedPoint& x, FixedFormat out);

} // namespace qlof
