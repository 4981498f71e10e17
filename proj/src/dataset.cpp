#include "qlof/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qlof/errors.hpp"

namespace qlof {

namespace {

double compute_c_norm(std::span<const double> values, std::size_t rows, std::size_t cols) {
    // max_{i,t} |x_j^i - x_j^t| is the per-column range.
    double c = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        double lo = values[j];
        double hi = values[j];
        for (std::size_t i = 1; i < rows; ++i) {
            lo = std::min(lo, values[i * cols + j]);
            hi = std::max(hi, values[i * cols + j]);
        }
        c = std::max(c, hi - lo);
    }
    return c;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

Dataset::Dataset(std::vector<double> values, std::size_t rows, std::size_t cols)
    : values_(std::move(values)), rows_(rows), cols_(cols), c_norm_(0.0) {
    if (cols_ == 0) throw DegenerateDataError("dataset needs at least one column");
    if (rows_ < 2) throw DegenerateDataError("dataset needs at least two points, got " + std::to_string(rows_));
    if (values_.size() != rows_ * cols_) throw std::invalid_argument("value count does not match shape");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DegenerateDataError("dataset contains a non-finite value");
    }
    c_norm_ = compute_c_norm(values_, rows_, cols_);
    if (!(c_norm_ > 0.0)) throw DegenerateDataError("all points are identical (C = 0)");
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DegenerateDataError("dataset is empty");
    const std::size_t cols = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& row : rows) {
        if (row.size() != cols) throw std::invalid_argument("rows have different lengths");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Dataset(std::move(flat), rows.size(), cols);
}

std::span<const double> Dataset::point(std::size_t i) const {
    if (i >= rows_) throw std::out_of_range("point index " + std::to_string(i) + " out of range");
    return {values_.data() + i * cols_, cols_};
}

double Dataset::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
        throw std::out_of_range("coordinate (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    }
    return values_[i * cols_ + j];
}

Dataset Dataset::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    return Dataset(std::move(v), rows_, cols_);
}

Dataset Dataset::permuted(std::span<const std::size_t> order) const {
    if (order.size() != rows_) throw std::invalid_argument("permutation has wrong length");
    std::vector<double> v;
    v.reserve(values_.size());
    for (std::size_t r : order) {
        auto p = point(r);
        v.insert(v.end(), p.begin(), p.end());
    }
    return Dataset(std::move(v), rows_, cols_);
}

Dataset parse_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        std::size_t col = 0;
        while (true) {
            const auto comma = rest.find(',');
            std::string_view cell = trim(rest.substr(0, comma));
            ++col;
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc() || ptr != last) {
                throw ParseError("not a number: '" + std::string(cell) + "'", line_no, col);
            }
            if (!std::isfinite(v)) throw ParseError("non-finite value", line_no, col);
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (rows == 0) {
            cols = col;
        } else if (col != cols) {
            throw ParseError("expected " + std::to_string(cols) + " columns, found " + std::to_string(col),
                             line_no, col);
        }
        ++rows;
    }
    if (rows < 2) throw DegenerateDataError("dataset needs at least two points, got " + std::to_string(rows));
    return Dataset(std::move(values), rows, cols);
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in);
}

double raw_distance(const Dataset& ds, std::size_t i, std::size_t t) {
    auto a = ds.point(i);
    auto b = ds.point(t);
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double normalized_distance(const Dataset& ds, std::size_t i, std::size_t t) {
    if (i == t) throw std::invalid_argument("normalized_distance needs two distinct points");
    const double d = raw_distance(ds, i, t) / (std::sqrt(static_cast<double>(ds.dim())) * ds.c_norm());
    return std::min(d, 1.0);
}

double QramOracle::query(std::size_t i, std::size_t j) const {
    const double v = ds_->at(i, j);
    if (ledger_ != nullptr) ledger_->charge("O_X");
    return v;
}

std::span<const double> QramOracle::query_row(std::size_t i) const {
    auto row = ds_->point(i);
    if (ledger_ != nullptr) ledger_->charge("O_X");
    return row;
}

} // namespace qlof
