#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

namespace qlof {

/// Per-oracle query counters. Counters only grow within a run; concurrent
/// charges from per-point workers are serialized by an internal mutex.
class QueryLedger {
public:
    QueryLedger() = default;
    QueryLedger(const QueryLedger& other);
    QueryLedger& operator=(const QueryLedger& other);

    void charge(std::string_view key, std::uint64_t count = 1);
    std::uint64_t get(std::string_view key) const;
    /// Sum over every counter whose key starts with `prefix`.
    std::uint64_t total(std::string_view prefix) const;
    void merge(const QueryLedger& other);
    std::map<std::string, std::uint64_t> snapshot() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::uint64_t, std::less<>> counters_;
};

/// Optional ledger binding handed to primitives: where to book their queries.
struct LedgerTap {
    QueryLedger* ledger = nullptr;
    std::string key;

    void charge(std::uint64_t count) const {
        if (ledger != nullptr && count > 0) ledger->charge(key, count);
    }
};

} // namespace qlof
