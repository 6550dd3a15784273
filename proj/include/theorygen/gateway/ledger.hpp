#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "theorygen/core/json_util.hpp"
#include "theorygen/gateway/types.hpp"

namespace theorygen {

/// model_id -> (usd per input token, usd per output token)
struct PriceTable {
    std::map<std::string, std::pair<double, double>> usd_per_token;

    /// Unpriced models cost 0; the entry still lands in the ledger so call
    /// counts stay auditable.
    double cost_usd(const std::string& model_id, const Usage& usage) const;

    json to_json() const;
    static PriceTable from_json(const json& j);
};

struct LedgerEntry {
    std::string stage;
    std::string model_id;
    long input_tokens = 0;
    long output_tokens = 0;
    double usd = 0.0;

    json to_json() const;
    static LedgerEntry from_json(const json& j);
};

/// Append-only cost ledger; appends are serialized, reads take a snapshot.
class CostLedger {
public:
    explicit CostLedger(PriceTable prices = {}) : prices_(std::move(prices)) {}

    CostLedger(CostLedger&& other) noexcept {
        std::lock_guard<std::mutex> lock(other.mutex_);
        prices_ = std::move(other.prices_);
        entries_ = std::move(other.entries_);
    }
    CostLedger(const CostLedger&) = delete;
    CostLedger& operator=(const CostLedger&) = delete;

    LedgerEntry append(const std::string& stage, const std::string& model_id, const Usage& usage);
    void append_entry(const LedgerEntry& entry);

    std::vector<LedgerEntry> entries() const;
    std::size_t size() const;
    double total_usd() const;
    double stage_total_usd(const std::string& stage) const;
    long stage_call_count(const std::string& stage) const;

    const PriceTable& prices() const { return prices_; }

    /// One JSON object per line, in append order.
    std::string to_jsonl() const;
    static CostLedger from_jsonl(const std::string& text, PriceTable prices);

private:
    PriceTable prices_;
    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
};

}  // namespace theorygen
