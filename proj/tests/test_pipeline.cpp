#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qlof/errors.hpp"
#include "qlof/pipeline.hpp"
#include "qlof/report.hpp"
#include "qlof/synthetic.hpp"

using namespace qlof;

namespace {

constexpr double pi = std::numbers::pi;

Dataset line(std::initializer_list<double> xs) {
    std::vector<std::vector<double>> rows;
    for (double x : xs) rows.push_back({x});
    return Dataset::from_rows(rows);
}

RunConfig config_for(std::size_t k, Backend b = Backend::exact) {
    RunConfig c;
    c.k = k;
    c.backend = b;
    return c;
}

double p95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1];
}

} // namespace

TEST_CASE("distance estimation at the exact endpoints") {
    const auto d = line({0, 0, 2});
    for (Backend b : {Backend::exact, Backend::ledger}) {
        Rng rng = make_rng(1);
        CHECK(estimate_distance(d, 0, 1, 8, 1, b, rng) == 0.0);
        CHECK(estimate_distance(d, 0, 2, 8, 1, b, rng) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("distance estimation error within eps1 with probability 8/pi^2") {
    const auto d = line({0, 1, 2});
    Rng rng = make_rng(2);
    const int trials = 500;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        if (std::abs(estimate_distance(d, 0, 1, 8, 1, Backend::exact, rng) - 0.5) <= pi / 256) ++ok;
    }
    CHECK(static_cast<double>(ok) / trials >= oracle::lower_band(8.0 / (pi * pi), trials));
}

TEST_CASE("multi-dimensional distance estimate tracks the normalized distance") {
    const auto d = Dataset::from_rows({{0, 0, 1}, {0.3, -0.2, 0.5}, {1, 1, 0}});
    Rng rng = make_rng(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 0; t < 3; ++t) {
            if (i == t) continue;
            const double est = estimate_distance(d, i, t, 10, 5, Backend::exact, rng);
            CHECK(std::abs(est - normalized_distance(d, i, t)) <= pi / 1024);
        }
    }
}

TEST_CASE("k-distance and neighbours on small lines") {
    const auto d = line({0, 1, 2});
    auto c = config_for(1);
    Rng rng = make_rng(4);
    const auto row0 = estimate_distances(d, 0, c, rng);
    CHECK(std::abs(find_k_distance(row0, c, rng) - 0.5) <= c.eps1());

    const auto row1 = estimate_distances(d, 1, c, rng);
    const double kd1 = find_k_distance(row1, c, rng);
    CHECK(find_neighbors(row1, kd1, 2, c, rng).neighbors == std::vector<std::size_t>{0, 2});

    c.k = 2;
    const double far = find_k_distance(row0, c, rng);
    CHECK(far == *std::max_element(row0.estimates.begin(), row0.estimates.end()));
    CHECK(find_neighbors(row0, far, 2, c, rng).neighbors == std::vector<std::size_t>{1, 2});

    const auto toy = line({0, 1, 2, 10});
    auto ct = config_for(2);
    const auto row3 = estimate_distances(toy, 3, ct, rng);
    const double kd3 = find_k_distance(row3, ct, rng);
    CHECK(std::abs(kd3 - 0.9) <= ct.eps1());
    CHECK(find_neighbors(row3, kd3, 2, ct, rng).neighbors == std::vector<std::size_t>{1, 2});

    const auto dup = line({0, 0, 3});
    const auto rowd = estimate_distances(dup, 0, config_for(1), rng);
    CHECK(find_k_distance(rowd, config_for(1), rng) == 0.0);
}

TEST_CASE("neighbour counting at exact-phase settings") {
    const auto d = line({0, 1, 3, 10, 20});
    auto c = config_for(2);
    c.ae_qubits_count = 4;
    Rng rng = make_rng(5);
    const auto row = estimate_distances(d, 0, c, rng);
    const double kd = find_k_distance(row, c, rng);
    for (int trial = 0; trial < 10; ++trial) CHECK(count_neighbors(row, kd, c, rng).count == 2);

    c.k = 4;
    const double all = find_k_distance(row, c, rng);
    CHECK(count_neighbors(row, all, c, rng).count == 4);
}

TEST_CASE("neighbourhood stage reproduces the classical table at high precision") {
    std::size_t checked = 0, rows = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto ds = separated_uniform(8, 2, 0.05, seed);
        auto c = config_for(2);
        c.ae_qubits_dist = 12;
        QueryLedger ledger;
        const auto step1 = build_neighborhood_table(ds, c, &ledger);
        const ClassicalLof ref(ds, 2);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            ++rows;
            // Equality is promised only when no true distance sits just
            // above the k-distance.
            const double kd = ref.row(i).kdist;
            bool margin = true;
            for (std::size_t t = 0; t < ds.size(); ++t) {
                const double d = t == i ? 0.0 : ref.distance(i, t);
                margin = margin && !(d > kd && d <= kd + (c.neighbor_tolerance + 2.0) * c.eps1());
            }
            if (!margin) continue;
            ++checked;
            CHECK(step1.table[i].neighbors == ref.row(i).neighbors);
            CHECK(std::abs(step1.table[i].kdist - kd) <= 4.0 * c.eps1());
        }
        CHECK(ledger.get("step1.q.min") > 0);
        CHECK(ledger.get("step1.q.grover") > 0);
        CHECK(ledger.get("step1.q.count") > 0);
        CHECK(ledger.get("step1.ox") == ledger.total("step1.q.") * ox_per_distance_query(12, 5));
    }
    CHECK(checked >= rows * 3 / 4);
    CHECK(ox_per_distance_query(3, 1) == 30);
}

TEST_CASE("neighbourhood stage on two points and determinism") {
    const auto two = line({0, 4});
    const auto s2 = build_neighborhood_table(two, config_for(1));
    CHECK(s2.table[0].neighbors == std::vector<std::size_t>{1});
    CHECK(s2.table[1].neighbors == std::vector<std::size_t>{0});

    const auto ds = separated_uniform(10, 3, 0.05, 9);
    const auto a = build_neighborhood_table(ds, config_for(3));
    const auto b = build_neighborhood_table(ds, config_for(3));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(a.table[i].neighbors == b.table[i].neighbors);
        CHECK(a.table[i].dists == b.table[i].dists);
        CHECK(a.table[i].kdist == b.table[i].kdist);
    }
}

TEST_CASE("U, V, G, W maps") {
    const ClassicalLof c(line({0, 1, 2}), 1);
    QueryLedger ledger;
    const NeighborhoodOracles o(c.table(), &ledger);
    CHECK(o.U(1) == std::pair<std::size_t, double>{2, 0.5});
    CHECK(o.W(1, 0) == 0);
    CHECK(o.W(1, 1) == 2);
    CHECK(o.V(1, 2) == 0.5);
    CHECK_THROWS_AS(o.V(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(o.U(3), std::out_of_range);
    CHECK_THROWS_AS(o.W(0, 1), std::out_of_range);
    const auto g = o.G(1);
    CHECK(g.size() == 2);
    CHECK(std::norm(g[0]) == doctest::Approx(0.5));
    CHECK(ledger.get("step2.q.U") == 1);
    CHECK(ledger.get("step2.q.V") == 1);
}

TEST_CASE("fixed-point densities") {
    const ClassicalLof c(line({0, 1, 2}), 1);
    const FixedFormat f{16, 12};
    const auto dens = compute_lrd_all(c.table(), f);
    CHECK(dens.inverse_lrd[1].decode() == 0.5);

    // Neighbours whose k-distance dominates every distance: max picks k_d.
    const ClassicalLof toy(line({0, 1, 2, 10}), 2);
    const auto td = compute_lrd_all(toy.table(), f);
    const NeighborhoodOracles o(toy.table());
    for (std::size_t j = 0; j < 2; ++j) {
        const std::size_t t = o.W(1, j);
        CHECK(td.reach[1][j] == q_max(FixedPoint::encode(toy.row(t).kdist, f), FixedPoint::encode(o.V(1, t), f)));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(td.inverse_lrd[i].decode() - 1.0 / toy.lrd(i)) <= 2.0 * std::ldexp(1.0, -12));
        for (std::size_t j = 0; j < toy.row(i).count(); ++j) {
            CHECK(td.neighbor_inverse_lrd[i][j] == td.inverse_lrd[toy.row(i).neighbors[j]]);
        }
    }
}

TEST_CASE("wider fractional part reduces the worst-case density error") {
    double worst8 = 0.0, worst12 = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto ds = separated_uniform(10, 2, 0.05, seed);
        const ClassicalLof c(ds, 2);
        const auto d8 = compute_lrd_all(c.table(), FixedFormat{16, 8});
        const auto d12 = compute_lrd_all(c.table(), FixedFormat{16, 12});
        for (std::size_t i = 0; i < ds.size(); ++i) {
            worst8 = std::max(worst8, std::abs(d8.inverse_lrd[i].decode() - 1.0 / c.lrd(i)));
            worst12 = std::max(worst12, std::abs(d12.inverse_lrd[i].decode() - 1.0 / c.lrd(i)));
        }
    }
    CHECK(worst12 < worst8);
}

TEST_CASE("fixed-point failure modes") {
    const ClassicalLof wide(line({0, 1, 2, 3, 4, 5}), 5);
    CHECK_THROWS_AS(compute_lrd_all(wide.table(), FixedFormat{1, 0}), std::overflow_error);

    const ClassicalLof tight(line({0, 0.1, 0.2, 10}), 1);
    CHECK_THROWS_AS(compute_lrd_all(tight.table(), FixedFormat{8, 2}), DegenerateDataError);
}

TEST_CASE("density spot check through apply_oracle") {
    const ClassicalLof toy(line({0, 1, 2, 10}), 2);
    const auto d = compute_lrd_all(toy.table(), FixedFormat{16, 12});
    for (std::size_t i = 0; i < 4; ++i) {
        const auto ok = spot_check_step2(toy.table(), d, i);
        REQUIRE(ok.has_value());
        CHECK(*ok);
    }
    // 18 neighbour slots need 5 qubits next to a 16-qubit word.
    const ClassicalLof crowd(uniform_grid(20, 1), 18);
    const auto cd = compute_lrd_all(crowd.table(), FixedFormat{16, 12});
    CHECK_FALSE(spot_check_step2(crowd.table(), cd, 0).has_value());
}

TEST_CASE("LOF estimation saturating and uniform cases") {
    NeighborhoodTable table(2);
    table[0] = {0.5, {1}, {0.5}};
    table[1] = {0.5, {0}, {0.5}};
    const FixedFormat f{16, 12};
    DensityTable d;
    d.format = f;
    d.inverse_lrd = {FixedPoint::encode(0.5, f), FixedPoint::encode(0.25, f)};
    d.neighbor_inverse_lrd = {{d.inverse_lrd[1]}, {d.inverse_lrd[0]}};
    d.reach = {{FixedPoint::encode(0.5, f)}, {FixedPoint::encode(0.5, f)}};
    auto c = config_for(1);
    const auto lofs = compute_lof_all(table, d, 8, 2.0, c);
    CHECK(lofs.ratios[0][0] == 2.0);
    CHECK(lofs.exact_amplitude[0] == 1.0);
    CHECK(lofs.lof[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(compute_lof_all(table, d, 8, 1.5, c), RatioBoundError);

    const ClassicalLof tri(line({0, 1, 2}), 1);
    const auto td = compute_lrd_all(tri.table(), f);
    const auto tl = compute_lof_all(tri.table(), td, 6, 2.0, c);
    for (double v : tl.lof) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("flag_anomalies") {
    const std::vector<double> lofs{0.9, 1.2, 4.0, 1.0, 2.5};
    for (Backend b : {Backend::exact, Backend::ledger}) {
        Rng rng = make_rng(6);
        CHECK(flag_anomalies(lofs, 0.5, b, rng).count() == 5);
        CHECK(flag_anomalies(lofs, 5.0, b, rng).count() == 0);
        CHECK(flag_anomalies(lofs, 1.5, b, rng).indices == std::vector<std::size_t>{2, 4});
    }
    Rng rng = make_rng(6);
    CHECK_THROWS(flag_anomalies(lofs, 0.0, Backend::ledger, rng));
}

TEST_CASE("error budget on the toy dataset") {
    const auto toy = line({0, 1, 2, 10});
    const auto c = config_for(2);
    const auto b = error_budget(c, toy);
    // Frozen from direct evaluation: max ratio 17/3, E = 34/3, P = 0.1^2.
    CHECK(b.max_ratio == doctest::Approx(17.0 / 3.0).epsilon(1e-15));
    CHECK(b.E == 11.333333333333334);
    CHECK(b.P == 0.010000000000000002);
    CHECK(b.total_bound == 2.4891394918091);
    CHECK(b.total_bound == doctest::Approx(b.E * pi / 1024 + 8 * (pi / 1024) / b.P).epsilon(1e-15));
    CHECK_FALSE(b.vacuous);

    auto finer = c;
    finer.ae_qubits_dist = 11;
    finer.ae_qubits_lof = 11;
    CHECK(error_budget(finer, toy).total_bound == doctest::Approx(b.total_bound / 2).epsilon(1e-14));
}

TEST_CASE("E is the safety factor alone when all densities are equal") {
    const auto b = error_budget(config_for(1), line({0, 1, 2}));
    CHECK(b.max_ratio == 1.0);
    CHECK(b.E == 2.0);
}

TEST_CASE("P satisfies the half-neighbourhood hypothesis and is the largest such value") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto ds = separated_uniform(9, 2, 0.05, seed);
        const ClassicalLof c(ds, 3);
        const double P = half_neighborhood_constant(c.table());
        auto holds = [&](double p) {
            for (const auto& row : c.table()) {
                std::size_t big = 0;
                for (double d : row.dists) big += d >= std::sqrt(p) ? 1 : 0;
                if (2 * big < row.count()) return false;
            }
            return true;
        };
        CHECK(holds(P * (1 - 1e-12)));
        CHECK_FALSE(holds(P * (1 + 1e-9)));
    }
}

TEST_CASE("end to end on the toy dataset") {
    const auto toy = line({0, 1, 2, 10});
    auto c = config_for(2);
    c.ae_qubits_lof = 8;
    const auto cmp = compare(toy, c);
    CHECK(cmp.flags_match);
    CHECK(cmp.quantum.flags.indices == std::vector<std::size_t>{3});
    CHECK(cmp.all_within_bound);
    CHECK(cmp.quantum.step2_spot_check == std::optional<bool>{true});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(cmp.quantum.lofs.lof[i] - cmp.classical.points[i].lof) <= cmp.quantum.budget.total_bound);
    }
    const auto& ledger = cmp.quantum.ledger;
    for (const char* key : {"step2.q.U", "step2.q.V", "step2.q.G", "step2.q.W", "step2.q.Uf", "step2.q.QMA",
                            "step2.q.DIV", "step3.q.ae", "step3.q.ratio", "step3.q.grover"}) {
        CHECK_MESSAGE(ledger.get(key) > 0, key);
    }
    CHECK(ledger.get("step3.cost") == ledger.get("step3.q.grover") * 5 * 255);
}

TEST_CASE("seeded runs are reproducible") {
    const auto ds = separated_uniform(8, 2, 0.05, 3);
    auto c = config_for(2);
    c.delta = 1.2;
    const auto a = compare(ds, c);
    const auto b = compare(ds, c);
    CHECK(comparison_manifest_json(a, ds) == comparison_manifest_json(b, ds));
    c.seed = 2;
    const auto other = compare(ds, c);
    CHECK(other.quantum.lofs.lof != a.quantum.lofs.lof);
}

TEST_CASE("ledger backend agrees with the classical detector") {
    const auto synth = gaussian_clusters({.points = 24, .dim = 2, .contamination = 0.1, .seed = 4});
    auto c = config_for(3, Backend::ledger);
    c.delta = 1.5;
    const auto cmp = compare(synth.data, c);
    CHECK(cmp.all_within_bound);
    CHECK(cmp.max_lof_error <= cmp.quantum.budget.total_bound);
}

TEST_CASE("more precision never raises the 95th-percentile LOF error") {
    std::vector<double> previous;
    double last = std::numeric_limits<double>::infinity();
    for (unsigned t : {6u, 8u, 10u}) {
        std::vector<double> errors;
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            const auto ds = separated_uniform(8, 2, 0.05, seed);
            auto c = config_for(2);
            c.ae_qubits_dist = t;
            c.ae_qubits_lof = t;
            const auto run = run_qlof(ds, c);
            const ClassicalLof ref(ds, 2);
            for (std::size_t i = 0; i < ds.size(); ++i) errors.push_back(std::abs(run.lofs.lof[i] - ref.lof(i)));
        }
        const double q = p95(errors);
        CHECK(q <= last);
        last = q;
    }
}

TEST_CASE("density ratios past the integer range are a configuration error") {
    const auto toy = line({0, 1, 2, 10});
    auto c = config_for(2, Backend::ledger);
    c.fp_width = 16;
    c.fp_frac = 14;
    CHECK_THROWS_AS(run_qlof(toy, c), ConfigError);
    c.fp_frac = 12;
    CHECK_NOTHROW(run_qlof(toy, c));
}
