#pragma once

// Reference computations written straight from the definitions, sharing no
// code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

struct Lof {
    std::vector<double> kdist; // raw units
    std::vector<std::vector<std::size_t>> neighbors;
    std::vector<double> lrd; // raw units
    std::vector<double> lof;
};

inline Lof brute_lof(const Rows& x, std::size_t k) {
    const std::size_t m = x.size();
    Lof out;
    out.kdist.resize(m);
    out.neighbors.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> d;
        for (std::size_t t = 0; t < m; ++t) {
            if (t != i) d.push_back(euclid(x[i], x[t]));
        }
        std::sort(d.begin(), d.end());
        out.kdist[i] = d[k - 1];
        for (std::size_t t = 0; t < m; ++t) {
            if (t != i && euclid(x[i], x[t]) <= out.kdist[i]) out.neighbors[i].push_back(t);
        }
    }
    out.lrd.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t t : out.neighbors[i]) s += std::max(out.kdist[t], euclid(x[i], x[t]));
        out.lrd[i] = static_cast<double>(out.neighbors[i].size()) / s;
    }
    out.lof.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t t : out.neighbors[i]) s += out.lrd[t] / out.lrd[i];
        out.lof[i] = s / static_cast<double>(out.neighbors[i].size());
    }
    return out;
}

inline double c_norm(const Rows& x) {
    double c = 0.0;
    for (std::size_t j = 0; j < x[0].size(); ++j) {
        for (const auto& a : x) {
            for (const auto& b : x) c = std::max(c, std::abs(a[j] - b[j]));
        }
    }
    return c;
}

/// Counting-register law for an eigenphase of `turns`, by the direct sum.
inline double pe_probability(double turns, std::uint64_t y, unsigned t) {
    const double size = std::ldexp(1.0, static_cast<int>(t));
    std::complex<double> acc{0.0, 0.0};
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << t); ++c) {
        acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(c) * (turns - static_cast<double>(y) / size));
    }
    return std::norm(acc) / (size * size);
}

/// Amplitude-estimation outcome law for good probability a.
inline std::vector<double> ae_law(double a, unsigned t) {
    const double theta = std::asin(std::sqrt(a));
    std::vector<double> p(std::size_t{1} << t);
    for (std::size_t y = 0; y < p.size(); ++y) {
        p[y] = 0.5 * (pe_probability(theta / std::numbers::pi, y, t) + pe_probability(-theta / std::numbers::pi, y, t));
    }
    return p;
}

/// 3-sigma lower band for a binomial proportion p over n trials.
inline double lower_band(double p, std::size_t n) {
    return p - 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace oracle
