#pragma once

#include <memory>
#include <string>

#include "theorygen/gateway/provider.hpp"

namespace theorygen {

/// Endpoints and credential sources for the live provider stack. API keys are
/// read from the named environment variables, never from config files.
struct HttpProviderConfig {
    std::string chat_base_url;    // e.g. "http://localhost:8089"
    std::string search_base_url;  // may equal chat_base_url
    std::string chat_path = "/v1/chat/completions";
    std::string search_path = "/v1/paper-search";
    std::string paper_path_prefix = "/v1/papers/";  // + <id> , + <id>/fulltext
    std::string chat_api_key_env = "THEORYGEN_CHAT_API_KEY";
    std::string search_api_key_env = "THEORYGEN_SEARCH_API_KEY";
    int timeout_seconds = 120;
};

/// Chat-completions-style provider over HTTP. Connection errors and 429/5xx
/// statuses raise transient errors (the gateway retries them); other non-2xx
/// statuses are permanent. A 404 on full-text fetch is absence, not an error.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    ~HttpProvider() override;

    ChatResponse chat_once(const std::string& rendered_prompt, const ChatRequest& request,
                           const std::string& model_id) override;
    std::vector<PaperRecord> search_once(const std::string& query, const DateRange& date_filter,
                                         int result_cap) override;
    std::optional<std::string> fetch_once(const std::string& paper_id) override;
    std::optional<PaperRecord> lookup_once(const std::string& paper_id) override;
    std::string name() const override { return "http"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace theorygen
