#include "qlof/fixedpoint.hpp"

#include <cmath>
#include <stdexcept>

namespace qlof {

namespace {

__extension__ using u128 = unsigned __int128;

void require_same(const FixedPoint& a, const FixedPoint& b, const char* op) {
    if (!(a.format() == b.format())) {
        throw std::invalid_argument(std::string(op) + ": format mismatch " + a.format().to_string() + " vs " +
                                    b.format().to_string());
    }
}

// Shift right by `drop` bits, rounding half to even.
std::uint64_t round_shift_right(u128 value, unsigned drop) {
    if (drop == 0) return static_cast<std::uint64_t>(value);
    const u128 one = 1;
    const u128 q = value >> drop;
    const u128 rem = value & ((one << drop) - 1);
    const u128 half = one << (drop - 1);
    u128 r = q;
    if (rem > half || (rem == half && (q & 1) != 0)) r += 1;
    if (r > UINT64_MAX) throw std::overflow_error("fixed-point value does not fit 64 bits");
    return static_cast<std::uint64_t>(r);
}

} // namespace

void FixedFormat::validate() const {
    if (width == 0 || width > kMaxWidth) {
        throw std::invalid_argument("fixed-point width must be in [1, 64], got " + std::to_string(width));
    }
    if (frac >= width) throw std::invalid_argument("fixed-point frac bits must be < width");
}

std::uint64_t FixedFormat::modulus_mask() const {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

double FixedFormat::max_value() const {
    return std::ldexp(static_cast<double>(modulus_mask()), -static_cast<int>(frac));
}

std::string FixedFormat::to_string() const {
    return "Q(" + std::to_string(width) + "," + std::to_string(frac) + ")";
}

FixedPoint FixedPoint::encode(double v, FixedFormat format) {
    format.validate();
    if (!(v >= 0.0)) throw std::domain_error("fixed-point encode needs a nonnegative value");
    const double scaled = std::ldexp(v, static_cast<int>(format.frac));
    if (scaled >= std::ldexp(1.0, static_cast<int>(format.width))) {
        throw std::overflow_error("value " + std::to_string(v) + " does not fit " + format.to_string());
    }
    // nearbyint honours the default FE_TONEAREST mode: ties go to even.
    const double rounded = std::nearbyint(scaled);
    const auto bits = static_cast<std::uint64_t>(rounded);
    if (bits > format.modulus_mask()) {
        throw std::overflow_error("value " + std::to_string(v) + " rounds past the top of " + format.to_string());
    }
    return {bits, format};
}

FixedPoint FixedPoint::from_bits(std::uint64_t bits, FixedFormat format) {
    format.validate();
    if (bits > format.modulus_mask()) throw std::overflow_error("bit pattern wider than " + format.to_string());
    return {bits, format};
}

double FixedPoint::decode() const {
    return std::ldexp(static_cast<double>(bits_), -static_cast<int>(format_.frac));
}

FixedPoint q_add(const FixedPoint& x, const FixedPoint& y) {
    require_same(x, y, "q_add");
    return FixedPoint::from_bits((x.bits() + y.bits()) & x.format().modulus_mask(), x.format());
}

FixedPoint q_mul_add(const FixedPoint& x, const FixedPoint& y, const FixedPoint& z) {
    require_same(x, y, "q_mul_add");
    const FixedFormat wide = x.format().doubled();
    if (!(z.format() == wide)) {
        throw std::invalid_argument("q_mul_add: accumulator must be " + wide.to_string() + ", got " +
                                    z.format().to_string());
    }
    const u128 sum = static_cast<u128>(x.bits()) * y.bits() + z.bits();
    return FixedPoint::from_bits(static_cast<std::uint64_t>(sum) & wide.modulus_mask(), wide);
}

FixedPoint q_max(const FixedPoint& a, const FixedPoint& b) {
    require_same(a, b, "q_max");
    return b.bits() > a.bits() ? b : a;
}

FixedPoint q_div(const FixedPoint& num, const FixedPoint& den, FixedFormat out) {
    require_same(num, den, "q_div");
    out.validate();
    if (den.bits() == 0) throw std::domain_error("q_div: division by zero");

    // Quotient bits = round(num * 2^out.frac / den), one guard bit for rounding.
    const u128 dividend = static_cast<u128>(num.bits()) << (out.frac + 1);
    const u128 divisor = den.bits();

    // Restoring long division, most significant dividend bit first.
    u128 remainder = 0;
    u128 quotient = 0;
    for (int bit = 127; bit >= 0; --bit) {
        remainder = (remainder << 1) | ((dividend >> bit) & 1);
        quotient <<= 1;
        if (remainder >= divisor) {
            remainder -= divisor;
            quotient |= 1;
        }
    }
    // quotient holds floor(2 * exact); the guard bit plus a nonzero remainder
    // decides the rounding.
    const bool guard = (quotient & 1) != 0;
    u128 q = quotient >> 1;
    if (guard && (remainder != 0 || (q & 1) != 0)) q += 1;
    if (q >> out.width != 0) {
        throw std::overflow_error("q_div: quotient does not fit " + out.to_string());
    }
    return FixedPoint::from_bits(static_cast<std::uint64_t>(q), out);
}

FixedPoint q_convert(const FixedPoint& x, FixedFormat out) {
    out.validate();
    const FixedFormat in = x.format();
    u128 v = x.bits();
    std::uint64_t bits = 0;
    if (out.frac >= in.frac) {
        v <<= (out.frac - in.frac);
        if (v > out.modulus_mask()) throw std::overflow_error("q_convert: value does not fit " + out.to_string());
        bits = static_cast<std::uint64_t>(v);
    } else {
        bits = round_shift_right(v, in.frac - out.frac);
        if (bits > out.modulus_mask()) throw std::overflow_error("q_convert: value does not fit " + out.to_string());
    }
    return FixedPoint::from_bits(bits, out);
}

} // namespace qlof
