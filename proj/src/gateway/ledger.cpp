#include "theorygen/gateway/ledger.hpp"

#include <sstream>

namespace theorygen {

double PriceTable::cost_usd(const std::string& model_id, const Usage& usage) const {
    auto it = usd_per_token.find(model_id);
    if (it == usd_per_token.end()) return 0.0;
    return static_cast<double>(usage.input_tokens) * it->second.first +
           static_cast<double>(usage.output_tokens) * it->second.second;
}

json PriceTable::to_json() const {
    json j = json::object();
    for (const auto& [model, prices] : usd_per_token) {
        j[model] = json::array({prices.first, prices.second});
    }
    return j;
}

PriceTable PriceTable::from_json(const json& j) {
    PriceTable t;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        if (!v.is_array() || v.size() != 2) {
            throw ValidationError("price table entries are [usd_in, usd_out] pairs");
        }
        t.usd_per_token[it.key()] = {v[0].get<double>(), v[1].get<double>()};
    }
    return t;
}

json LedgerEntry::to_json() const {
    json j;
    j["stage"] = stage;
    j["model_id"] = model_id;
    j["input_tokens"] = input_tokens;
    j["output_tokens"] = output_tokens;
    j["usd"] = usd;
    return j;
}

LedgerEntry LedgerEntry::from_json(const json& j) {
    JsonReader r(j, "LedgerEntry");
    LedgerEntry e;
    e.stage = r.require_string("stage");
    e.model_id = r.require_string("model_id");
    e.input_tokens = r.require("input_tokens").get<long>();
    e.output_tokens = r.require("output_tokens").get<long>();
    e.usd = r.require("usd").get<double>();
    if (e.input_tokens < 0 || e.output_tokens < 0) {
        throw ValidationError("ledger token counts must be non-negative");
    }
    return e;
}

LedgerEntry CostLedger::append(const std::string& stage, const std::string& model_id,
                               const Usage& usage) {
    if (usage.input_tokens < 0 || usage.output_tokens < 0) {
        throw ValidationError("ledger token counts must be non-negative");
    }
    LedgerEntry e{stage, model_id, usage.input_tokens, usage.output_tokens,
                  prices_.cost_usd(model_id, usage)};
    append_entry(e);
    return e;
}

void CostLedger::append_entry(const LedgerEntry& entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.push_back(entry);
}

std::vector<LedgerEntry> CostLedger::entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_;
}

std::size_t CostLedger::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

double CostLedger::total_usd() const {
    std::lock_guard<std::mutex> lock(mutex_);
    double sum = 0.0;
    for (const auto& e : entries_) sum += e.usd;
    return sum;
}

double CostLedger::stage_total_usd(const std::string& stage) const {
    std::lock_guard<std::mutex> lock(mutex_);
    double sum = 0.0;
    for (const auto& e : entries_) {
        if (e.stage == stage) sum += e.usd;
    }
    return sum;
}

long CostLedger::stage_call_count(const std::string& stage) const {
    std::lock_guard<std::mutex> lock(mutex_);
    long n = 0;
    for (const auto& e : entries_) {
        if (e.stage == stage) ++n;
    }
    return n;
}

std::string CostLedger::to_jsonl() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ostringstream out;
    for (const auto& e : entries_) out << e.to_json().dump() << "\n";
    return out.str();
}

CostLedger CostLedger::from_jsonl(const std::string& text, PriceTable prices) {
    CostLedger ledger(std::move(prices));
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ledger.append_entry(LedgerEntry::from_json(parse_json(line)));
    }
    return ledger;
}

}  // namespace theorygen
