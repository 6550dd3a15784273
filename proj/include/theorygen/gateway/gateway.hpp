#pragma once

#include <filesystem>
#include <memory>

#include "theorygen/gateway/cache.hpp"
#include "theorygen/gateway/ledger.hpp"
#include "theorygen/gateway/prompts.hpp"
#include "theorygen/gateway/provider.hpp"
#include "theorygen/gateway/rate_limiter.hpp"

namespace theorygen {

struct RetryPolicy {
    int max_attempts = 5;
    int base_delay_ms = 100;
    int max_delay_ms = 5000;
    double jitter = 0.1;
};

struct GatewayConfig {
    PriceTable prices;
    RetryPolicy retry;
    double requests_per_second = 0.0;  // <= 0 disables rate limiting
    double burst = 16.0;
    std::map<std::string, std::string> models;  // stage -> model_id
    std::string default_model = "general-model";
    std::filesystem::path cache_dir;  // empty -> memory-only cache
    std::uint64_t seed = 0;
};

/// The single choke point for external capabilities: chat completion, paper
/// search, full-text fetch. Wraps a Provider with retries (bounded exponential
/// backoff), token-bucket rate limiting, an on-disk response cache, structured
/// response validation (one reprompt, then failure), and cost accounting.
/// Exactly one ledger entry is appended per successful provider call; cache
/// hits append nothing. No other module performs network activity: this is the
/// only component configured with endpoints and credentials.
///
/// Thread-safety: chat/search/fetch may be called from many tasks; the ledger
/// serializes appends and the cache serializes writes internally.
class Gateway {
public:
    Gateway(GatewayConfig config, std::unique_ptr<Provider> provider);

    /// Renders, validates, and sends a chat request. Throws ValidationError on
    /// an unbound placeholder (before any provider activity), GatewayError
    /// after the retry budget, ContractViolation when a structured response
    /// stays invalid after the one allowed reprompt.
    ChatResponse chat(const ChatRequest& request);

    std::vector<PaperRecord> search_papers(const std::string& query, const DateRange& date_filter,
                                           int result_cap);

    std::optional<std::string> fetch_full_text(const std::string& paper_id);

    std::optional<PaperRecord> lookup_paper(const std::string& paper_id);

    /// n repeated binary votes on a claim; the vote mean estimates the
    /// generating model's belief. Samples that fail after retries are excluded
    /// and reported through n_effective.
    BeliefEstimate self_belief_samples(const std::string& claim, int n, const std::string& stage);

    CostLedger& ledger() { return ledger_; }
    const CostLedger& ledger() const { return ledger_; }
    const PromptLibrary& prompts() const { return prompts_; }
    const GatewayConfig& config() const { return config_; }

    std::string model_for(const std::string& stage) const;

private:
    ChatResponse chat_attempt_loop(const std::string& rendered, const ChatRequest& request,
                                   const std::string& model_id);
    void backoff_sleep(int attempt, std::uint64_t jitter_key);
    std::string validate_structured(const ChatRequest& request, const std::string& text) const;

    GatewayConfig config_;
    std::unique_ptr<Provider> provider_;
    PromptLibrary prompts_;
    CostLedger ledger_;
    ResponseCache cache_;
    RateLimiter rate_;
};

}  // namespace theorygen
