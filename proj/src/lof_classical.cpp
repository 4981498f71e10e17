#include "qlof/lof_classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qlof/errors.hpp"

namespace qlof {

namespace {

void check_k(const Dataset& ds, std::size_t k) {
    if (k < 1 || k > ds.size() - 1) {
        throw std::out_of_range("k = " + std::to_string(k) + " outside [1, " + std::to_string(ds.size() - 1) + "]");
    }
}

} // namespace

double ordered_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double v : terms) sum += v;
    return sum;
}

std::vector<std::size_t> LofReport::flagged_indices() const {
    std::vector<std::size_t> out;
    for (const auto& p : points) {
        if (p.flagged) out.push_back(p.index);
    }
    return out;
}

ClassicalLof::ClassicalLof(const Dataset& ds, std::size_t k) : k_(k), m_(ds.size()) {
    check_k(ds, k);
    dist_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t t = i + 1; t < m_; ++t) {
            const double d = normalized_distance(ds, i, t);
            dist_[i * m_ + t] = d;
            dist_[t * m_ + i] = d;
        }
    }

    table_.resize(m_);
    std::vector<double> others;
    for (std::size_t i = 0; i < m_; ++i) {
        others.clear();
        for (std::size_t t = 0; t < m_; ++t) {
            if (t != i) others.push_back(dist_[i * m_ + t]);
        }
        std::nth_element(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1), others.end());
        auto& row = table_[i];
        row.kdist = others[k - 1];
        for (std::size_t t = 0; t < m_; ++t) {
            if (t != i && dist_[i * m_ + t] <= row.kdist) {
                row.neighbors.push_back(t);
                row.dists.push_back(dist_[i * m_ + t]);
            }
        }
    }

    lrd_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& row = table_[i];
        std::vector<double> reach;
        reach.reserve(row.count());
        for (std::size_t t : row.neighbors) reach.push_back(reach_dist(i, t));
        const double mean = ordered_sum(std::move(reach)) / static_cast<double>(row.count());
        if (!(mean > 0.0)) {
            throw DegenerateDataError("point " + std::to_string(i) +
                                      " has zero mean reachability distance (duplicate points with k-distance 0)");
        }
        lrd_[i] = 1.0 / mean;
    }

    lof_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& row = table_[i];
        std::vector<double> ratios;
        ratios.reserve(row.count());
        for (std::size_t t : row.neighbors) ratios.push_back(lrd_[t] / lrd_[i]);
        lof_[i] = ordered_sum(std::move(ratios)) / static_cast<double>(row.count());
    }
}

double ClassicalLof::distance(std::size_t i, std::size_t t) const {
    if (i >= m_ || t >= m_) throw std::out_of_range("point index out of range");
    return dist_[i * m_ + t];
}

double ClassicalLof::reach_dist(std::size_t i, std::size_t t) const {
    return std::max(table_.at(t).kdist, distance(i, t));
}

LofReport ClassicalLof::report(double delta) const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    LofReport r;
    r.k = k_;
    r.delta = delta;
    r.points.reserve(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        PointScore p;
        p.index = i;
        p.kdist = table_[i].kdist;
        p.count = table_[i].count();
        p.lrd = lrd_[i];
        p.lof = lof_[i];
        p.flagged = lof_[i] >= delta;
        r.flagged_count += p.flagged ? 1 : 0;
        r.points.push_back(p);
    }
    return r;
}

double k_distance(const Dataset& ds, std::size_t i, std::size_t k) {
    check_k(ds, k);
    std::vector<double> others;
    for (std::size_t t = 0; t < ds.size(); ++t) {
        if (t != i) others.push_back(normalized_distance(ds, i, t));
    }
    std::nth_element(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1), others.end());
    return others[k - 1];
}

NeighborhoodRow neighborhood(const Dataset& ds, std::size_t i, std::size_t k) {
    NeighborhoodRow row;
    row.kdist = k_distance(ds, i, k);
    for (std::size_t t = 0; t < ds.size(); ++t) {
        if (t == i) continue;
        const double d = normalized_distance(ds, i, t);
        if (d <= row.kdist) {
            row.neighbors.push_back(t);
            row.dists.push_back(d);
        }
    }
    return row;
}

double reach_dist(const Dataset& ds, std::size_t i, std::size_t t, std::size_t k) {
    return std::max(k_distance(ds, t, k), normalized_distance(ds, i, t));
}

double lrd(const Dataset& ds, std::size_t i, std::size_t k) {
    return ClassicalLof(ds, k).lrd(i);
}

double lof(const Dataset& ds, std::size_t i, std::size_t k) {
    return ClassicalLof(ds, k).lof(i);
}

LofReport flag(const Dataset& ds, std::size_t k, double delta) {
    return ClassicalLof(ds, k).report(delta);
}

} // namespace qlof
