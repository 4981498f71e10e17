#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qlof/errors.hpp"
#include "qlof/lof_classical.hpp"
#include "qlof/synthetic.hpp"

using namespace qlof;

namespace {

Dataset line(std::initializer_list<double> xs) {
    std::vector<std::vector<double>> rows;
    for (double x : xs) rows.push_back({x});
    return Dataset::from_rows(rows);
}

oracle::Rows random_rows(std::size_t m, std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    oracle::Rows rows(m, std::vector<double>(n));
    for (auto& r : rows) {
        for (double& v : r) v = u(gen);
    }
    return rows;
}

// Frozen from the brute-force oracle on [0, 1, 2, 10] with k = 2.
constexpr double kToyLof[] = {0.875, 1.3333333333333333, 0.875, 4.958333333333334};
constexpr double kToyLrd[] = {6.666666666666666, 5.0, 6.666666666666666, 1.176470588235294};
constexpr double kToyKdist[] = {0.2, 0.1, 0.2, 0.9};

} // namespace

TEST_CASE("k-distance examples") {
    const auto d = line({0, 1, 2});
    CHECK(k_distance(d, 0, 1) == 0.5);
    const auto toy = line({0, 1, 2, 10});
    CHECK(k_distance(toy, 3, 2) * toy.c_norm() == doctest::Approx(9.0).epsilon(1e-15));
    CHECK_THROWS_AS(k_distance(toy, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(k_distance(toy, 0, 4), std::out_of_range);

    const auto dup = line({0, 0, 3, 5});
    CHECK(k_distance(dup, 0, 1) == 0.0);
}

TEST_CASE("neighbourhood examples") {
    const auto d = line({0, 1, 2});
    const auto mid = neighborhood(d, 1, 1);
    CHECK(mid.neighbors == std::vector<std::size_t>{0, 2});
    CHECK(mid.count() == 2);
    const auto first = neighborhood(d, 0, 1);
    CHECK(first.neighbors == std::vector<std::size_t>{1});
    const auto all = neighborhood(d, 0, 2);
    CHECK(all.neighbors == std::vector<std::size_t>{1, 2});
}

TEST_CASE("reachability distance picks the larger value") {
    const auto toy = line({0, 1, 2, 10});
    // far pair: d(3, 2) = 0.8 > k_d(2) = 0.2
    CHECK(reach_dist(toy, 3, 2, 2) == doctest::Approx(0.8).epsilon(1e-15));
    // close pair: d(1, 0) = 0.1 < k_d(0) = 0.2
    CHECK(reach_dist(toy, 1, 0, 2) == doctest::Approx(0.2).epsilon(1e-15));
    // equal: d(0, 2) = k_d(2) = 0.2
    CHECK(reach_dist(toy, 0, 2, 2) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("lrd and LOF examples") {
    const auto d = line({0, 1, 2});
    // raw mean reach-dist 1, normalized 0.5
    CHECK(lrd(d, 1, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lrd(d, 1, 1) / (std::sqrt(1.0) * d.c_norm()) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t i = 0; i < 3; ++i) CHECK(lof(d, i, 1) == doctest::Approx(1.0).epsilon(1e-15));

    const auto toy = line({0, 1, 2, 10});
    CHECK(lrd(toy, 3, 2) < 0.25 * lrd(toy, 0, 2));
    CHECK(lof(toy, 3, 2) > 2.0);
}

TEST_CASE("toy dataset regression values") {
    const auto toy = line({0, 1, 2, 10});
    const ClassicalLof c(toy, 2);
    const auto ref = oracle::brute_lof({{0}, {1}, {2}, {10}}, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(c.lof(i) == kToyLof[i]);
        CHECK(c.lrd(i) == kToyLrd[i]);
        CHECK(c.row(i).kdist == kToyKdist[i]);
        CHECK(c.lof(i) == doctest::Approx(ref.lof[i]).epsilon(1e-14));
        CHECK(c.lrd(i) / toy.c_norm() == doctest::Approx(ref.lrd[i]).epsilon(1e-14));
    }
    // Rational forms: LOF = 7/8, 4/3, 7/8, 119/24.
    CHECK(kToyLof[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(kToyLof[3] == doctest::Approx(119.0 / 24.0).epsilon(1e-15));

    const auto report = flag(toy, 2, 1.5);
    CHECK(report.flagged_indices() == std::vector<std::size_t>{3});
    CHECK(report.flagged_count == 1);
}

TEST_CASE("flag thresholds") {
    const auto toy = line({0, 1, 2, 10});
    CHECK(flag(toy, 2, 0.5).flagged_count == 4);
    CHECK(flag(toy, 2, 0.875).flagged_count == 4);
    CHECK(flag(toy, 2, 5.0).flagged_count == 0);
    CHECK_THROWS(flag(toy, 2, 0.0));
    const auto r = flag(toy, 2, 1.0);
    for (const auto& p : r.points) CHECK(p.flagged == (p.lof >= 1.0));
}

TEST_CASE("agreement with the brute-force oracle on random data") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 4 + trial % 13;
        const std::size_t n = 1 + trial % 4;
        const std::size_t k = 1 + trial % 3;
        const auto rows = random_rows(m, n, gen);
        const auto ds = Dataset::from_rows(rows);
        const ClassicalLof c(ds, k);
        const auto ref = oracle::brute_lof(rows, k);
        const double scale = std::sqrt(static_cast<double>(n)) * ds.c_norm();
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(c.row(i).neighbors == ref.neighbors[i]);
            CHECK(c.row(i).kdist * scale == doctest::Approx(ref.kdist[i]).epsilon(1e-12));
            CHECK(c.lof(i) == doctest::Approx(ref.lof[i]).epsilon(1e-12));
            CHECK(c.lrd(i) / scale == doctest::Approx(ref.lrd[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("neighbourhood table invariants") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 5 + trial % 8;
        const std::size_t k = 1 + trial % 4;
        const auto ds = Dataset::from_rows(random_rows(m, 2, gen));
        const ClassicalLof c(ds, k);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& row = c.row(i);
            CHECK(row.count() >= k);
            CHECK(std::find(row.neighbors.begin(), row.neighbors.end(), i) == row.neighbors.end());
            CHECK(std::is_sorted(row.neighbors.begin(), row.neighbors.end()));
            for (std::size_t t = 0; t < m; ++t) {
                if (t == i) continue;
                const bool listed = std::find(row.neighbors.begin(), row.neighbors.end(), t) != row.neighbors.end();
                CHECK(listed == (c.distance(i, t) <= row.kdist));
            }
            // Fewer than k points lie strictly closer than the k-distance.
            std::size_t closer = 0;
            for (double d : row.dists) closer += d < row.kdist ? 1 : 0;
            CHECK(closer <= k - 1);
            CHECK(c.lrd(i) > 0.0);
        }
    }
}

TEST_CASE("scale invariance and permutation equivariance") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> cdist(0.01, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 6 + trial % 10;
        const auto ds = Dataset::from_rows(random_rows(m, 3, gen));
        const ClassicalLof base(ds, 3);

        const ClassicalLof scaled(ds.scaled(cdist(gen)), 3);
        for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(scaled.lof(i) - base.lof(i)) <= 1e-9);

        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), gen);
        const ClassicalLof perm(ds.permuted(order), 3);
        for (std::size_t r = 0; r < m; ++r) {
            CHECK(perm.lof(r) == base.lof(order[r]));
            CHECK(perm.lrd(r) == base.lrd(order[r]));
        }
    }
}

TEST_CASE("uniform grids have LOF 1 in the interior") {
    const auto g1 = uniform_grid(12, 1);
    const ClassicalLof c1(g1, 2);
    for (std::size_t i = 3; i + 3 < 12; ++i) CHECK(std::abs(c1.lof(i) - 1.0) <= 1e-9);

    const auto g2 = uniform_grid(7, 2);
    const ClassicalLof c2(g2, 2);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const double x = g2.at(i, 0);
        const double y = g2.at(i, 1);
        if (x >= 2 && x <= 4 && y >= 2 && y <= 4) CHECK(std::abs(c2.lof(i) - 1.0) <= 1e-9);
    }
}

TEST_CASE("duplicates that zero the mean reachability distance are rejected") {
    const auto d = line({0, 0, 0, 5});
    CHECK_THROWS_AS(ClassicalLof(d, 2), DegenerateDataError);
}

TEST_CASE("ordered_sum does not depend on term order") {
    std::vector<double> v{1e16, 1.0, -1e16, 3.0, 0.1};
    const double s = ordered_sum(v);
    std::sort(v.begin(), v.end(), std::greater<>());
    CHECK(ordered_sum(v) == s);
}
