#include "qlof/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlof/random.hpp"

namespace qlof {

namespace {

// Box-Muller on our own uniform draws keeps the stream identical across
// standard libraries.
double gaussian(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace

SyntheticData gaussian_clusters(const ClusterSpec& spec) {
    if (spec.points < 2) throw std::invalid_argument("need at least two points");
    if (spec.dim < 1) throw std::invalid_argument("need at least one dimension");
    if (spec.contamination < 0.0 || spec.contamination >= 1.0) {
        throw std::invalid_argument("contamination must lie in [0, 1)");
    }
    Rng rng = make_rng(spec.seed, 0x5c, spec.points);
    std::size_t planted = static_cast<std::size_t>(std::llround(spec.contamination * static_cast<double>(spec.points)));
    if (spec.contamination > 0.0) planted = std::max<std::size_t>(planted, 1);
    planted = std::min(planted, spec.points - 1);
    const std::size_t inliers = spec.points - planted;

    std::vector<double> values;
    values.reserve(spec.points * spec.dim);
    for (std::size_t p = 0; p < inliers; ++p) {
        const double centre = (p % 2 == 0) ? 0.0 : spec.separation;
        for (std::size_t j = 0; j < spec.dim; ++j) values.push_back(centre + spec.spread * gaussian(rng));
    }
    const double span = spec.separation + 6.0 * spec.spread;
    const double lo = spec.separation / 2.0 - 1.5 * span;
    SyntheticData out{Dataset({0.0, 1.0}, 2, 1), {}};
    for (std::size_t p = 0; p < planted; ++p) {
        for (std::size_t j = 0; j < spec.dim; ++j) values.push_back(lo + 3.0 * span * uniform01(rng));
        out.outliers.push_back(inliers + p);
    }
    out.data = Dataset(std::move(values), spec.points, spec.dim);
    return out;
}

Dataset separated_uniform(std::size_t m, std::size_t n, double min_separation, std::uint64_t seed) {
    if (m < 2 || n < 1) throw std::invalid_argument("need at least two points and one dimension");
    Rng rng = make_rng(seed, 0x5d, m * 16 + n);
    // Points live in [0, 1]^n, so C <= 1 and an absolute spacing of
    // min_separation implies the relative one.
    for (int restart = 0; restart < 1000; ++restart) {
        std::vector<double> values;
        values.reserve(m * n);
        std::size_t placed = 0;
        for (int tries = 0; placed < m && tries < 10000; ++tries) {
            std::vector<double> p(n);
            for (double& v : p) v = uniform01(rng);
            bool ok = true;
            for (std::size_t i = 0; i < placed && ok; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += (p[j] - values[i * n + j]) * (p[j] - values[i * n + j]);
                ok = std::sqrt(s) >= min_separation;
            }
            if (!ok) continue;
            values.insert(values.end(), p.begin(), p.end());
            ++placed;
        }
        if (placed == m) return Dataset(std::move(values), m, n);
    }
    throw std::runtime_error("could not draw a separated dataset");
}

Dataset uniform_grid(std::size_t side, std::size_t dim) {
    if (side < 2 || dim < 1) throw std::invalid_argument("grid needs side >= 2 and dim >= 1");
    std::size_t count = 1;
    for (std::size_t j = 0; j < dim; ++j) count *= side;
    std::vector<double> values;
    values.reserve(count * dim);
    for (std::size_t p = 0; p < count; ++p) {
        std::size_t rest = p;
        for (std::size_t j = 0; j < dim; ++j) {
            values.push_back(static_cast<double>(rest % side));
            rest /= side;
        }
    }
    return Dataset(std::move(values), count, dim);
}

} // namespace qlof
