#include "qlof/ledger.hpp"

namespace qlof {

QueryLedger::QueryLedger(const QueryLedger& other) {
    std::lock_guard lock(other.mutex_);
    counters_ = other.counters_;
}

QueryLedger& QueryLedger::operator=(const QueryLedger& other) {
    if (this == &other) return *this;
    auto copy = other.snapshot();
    std::lock_guard lock(mutex_);
    counters_.clear();
    counters_.insert(copy.begin(), copy.end());
    return *this;
}

void QueryLedger::charge(std::string_view key, std::uint64_t count) {
    std::lock_guard lock(mutex_);
    auto it = counters_.find(key);
    if (it == counters_.end()) {
        counters_.emplace(std::string(key), count);
    } else {
        it->second += count;
    }
}

std::uint64_t QueryLedger::get(std::string_view key) const {
    std::lock_guard lock(mutex_);
    auto it = counters_.find(key);
    return it == counters_.end() ? 0 : it->second;
}

std::uint64_t QueryLedger::total(std::string_view prefix) const {
    std::lock_guard lock(mutex_);
    std::uint64_t sum = 0;
    for (auto it = counters_.lower_bound(prefix); it != counters_.end(); ++it) {
        if (std::string_view(it->first).substr(0, prefix.size()) != prefix) break;
        sum += it->second;
    }
    return sum;
}

void QueryLedger::merge(const QueryLedger& other) {
    if (this == &other) return;
    for (const auto& [key, value] : other.snapshot()) charge(key, value);
}

std::map<std::string, std::uint64_t> QueryLedger::snapshot() const {
    std::lock_guard lock(mutex_);
    return {counters_.begin(), counters_.end()};
}

void QueryLedger::clear() {
    std::lock_guard lock(mutex_);
    counters_.clear();
}

} // namespace qlof
