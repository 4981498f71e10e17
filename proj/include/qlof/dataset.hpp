#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include "qlof/ledger.hpp"

namespace qlof {

/// Immutable m x n matrix of points together with the global normalization
/// constant C = max over all (i, t, j) of |x_j^i - x_j^t|.
///
/// Indices are zero-based throughout the library.
class Dataset {
public:
    /// Row-major values; validates shape, finiteness, m >= 2 and C > 0.
    Dataset(std::vector<double> values, std::size_t rows, std::size_t cols);

    static Dataset from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return cols_; }
    double c_norm() const noexcept { return c_norm_; }

    std::span<const double> point(std::size_t i) const;
    double at(std::size_t i, std::size_t j) const;
    std::span<const double> values() const noexcept { return values_; }

    /// Copy with every coordinate multiplied by `factor` (> 0).
    Dataset scaled(double factor) const;
    /// Copy whose row r is this dataset's row order[r].
    Dataset permuted(std::span<const std::size_t> order) const;

private:
    std::vector<double> values_;
    std::size_t rows_;
    std::size_t cols_;
    double c_norm_;
};

/// Headerless comma-separated numbers, one point per row. Blank lines are
/// skipped.
Dataset parse_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

/// Euclidean distance in the data's own units.
double raw_distance(const Dataset& ds, std::size_t i, std::size_t t);

/// d(x^i, x^t) / (sqrt(n) * C), guaranteed to lie in [0, 1]. Rejects i == t.
double normalized_distance(const Dataset& ds, std::size_t i, std::size_t t);

/// Classical emulation of the QRAM access oracle O_X : |i>|j>|0> -> |i>|j>|x_j^i>.
///
/// Every call is one oracle application and is booked once on the ledger key
/// "O_X", however many basis states the application serves.
class QramOracle {
public:
    explicit QramOracle(const Dataset& ds, QueryLedger* ledger = nullptr)
        : ds_(&ds), ledger_(ledger) {}

    double query(std::size_t i, std::size_t j) const;
    /// All coordinates of point i in a single superposed application.
    std::span<const double> query_row(std::size_t i) const;

    const Dataset& dataset() const noexcept { return *ds_; }

private:
    const Dataset* ds_;
    QueryLedger* ledger_;
};

} // namespace qlof
