#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qlof/dataset.hpp"
#include "qlof/errors.hpp"

using namespace qlof;

namespace {

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

} // namespace

TEST_CASE("parse_csv reads shape and C") {
    const auto a = parse("0\n1\n2\n");
    CHECK(a.size() == 3);
    CHECK(a.dim() == 1);
    CHECK(a.c_norm() == 2.0);

    const auto b = parse("0,0\n3,4\n");
    CHECK(b.size() == 2);
    CHECK(b.dim() == 2);
    CHECK(b.c_norm() == 4.0);
}

TEST_CASE("blank lines, CRLF and negative coordinates") {
    const auto d = parse("-1.5,2\r\n\n3,4e0\n");
    CHECK(d.size() == 2);
    CHECK(d.at(0, 0) == -1.5);
    CHECK(d.c_norm() == 4.5);
}

TEST_CASE("identical points are degenerate") {
    CHECK_THROWS_AS(parse("5\n5\n"), DegenerateDataError);
    CHECK_THROWS_AS(parse("5\n"), DegenerateDataError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse("1,2\n3,x\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
        CHECK(e.column() == 2);
    }
    CHECK_THROWS_AS(parse("1,2\n3\n"), ParseError);
    CHECK_THROWS_AS(parse("1,nan\n3,4\n"), ParseError);
}

TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_csv("/nonexistent/points.csv"), IoError);
}

TEST_CASE("O_X lookups and ledger") {
    const auto d = parse("0\n1\n2\n");
    QueryLedger ledger;
    const QramOracle ox(d, &ledger);
    CHECK(ox.query(1, 0) == 1.0);
    CHECK(ox.query(2, 0) == 2.0);
    CHECK_THROWS_AS(ox.query(3, 0), std::out_of_range);
    CHECK(ox.query_row(0).size() == 1);
    CHECK(ledger.get("O_X") == 3);
}

TEST_CASE("normalized distance examples") {
    const auto line = parse("0\n2\n");
    CHECK(normalized_distance(line, 0, 1) == 1.0);

    const auto dup = parse("0\n3\n3\n");
    CHECK(normalized_distance(dup, 1, 2) == 0.0);

    const auto plane = parse("0,0\n3,4\n");
    CHECK(normalized_distance(plane, 0, 1) == doctest::Approx(5.0 / (std::sqrt(2.0) * 4.0)).epsilon(1e-15));
    CHECK(normalized_distance(plane, 0, 1) == doctest::Approx(0.88388).epsilon(1e-5));
    CHECK_THROWS_AS(normalized_distance(plane, 1, 1), std::invalid_argument);
}

TEST_CASE("distance properties on random data") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 3 + trial % 6;
        const std::size_t n = 1 + trial % 4;
        oracle::Rows rows(m, std::vector<double>(n));
        for (auto& r : rows) {
            for (double& v : r) v = u(gen);
        }
        const auto d = Dataset::from_rows(rows);
        CHECK(d.c_norm() == oracle::c_norm(rows));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t t = 0; t < m; ++t) {
                if (i == t) continue;
                const double dn = normalized_distance(d, i, t);
                CHECK(dn == normalized_distance(d, t, i));
                CHECK(dn >= 0.0);
                CHECK(dn <= 1.0);
                CHECK(raw_distance(d, i, t) == doctest::Approx(oracle::euclid(rows[i], rows[t])).epsilon(1e-14));
                for (std::size_t s = 0; s < m; ++s) {
                    if (s == i || s == t) continue;
                    CHECK(raw_distance(d, i, t) <= raw_distance(d, i, s) + raw_distance(d, s, t) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("scaled and permuted copies") {
    const auto d = parse("0,1\n2,5\n4,4\n");
    const auto s = d.scaled(3.0);
    CHECK(s.c_norm() == 12.0);
    CHECK(normalized_distance(s, 0, 2) == doctest::Approx(normalized_distance(d, 0, 2)).epsilon(1e-15));
    const std::vector<std::size_t> order{2, 0, 1};
    const auto p = d.permuted(order);
    CHECK(p.at(0, 0) == 4.0);
    CHECK(p.at(1, 1) == 1.0);
    CHECK_THROWS_AS(d.scaled(0.0), std::invalid_argument);
}
