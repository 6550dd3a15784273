#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "theorygen/core/date.hpp"
#include "theorygen/core/types.hpp"
#include "theorygen/gateway/types.hpp"

namespace theorygen {

/// Raw provider failure. Transient failures are retried by the gateway;
/// permanent ones surface immediately.
class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& what, bool is_transient)
        : std::runtime_error(what), transient(is_transient) {}
    bool transient;
};

/// One backing capability set (a real provider stack or the deterministic
/// mock). Single-shot calls: retries, rate limiting, caching, ledger
/// accounting, and contract validation all live in the Gateway wrapper, so
/// providers stay dumb.
class Provider {
public:
    virtual ~Provider() = default;

    virtual ChatResponse chat_once(const std::string& rendered_prompt, const ChatRequest& request,
                                   const std::string& model_id) = 0;

    /// Metadata stubs ordered by provider relevance; full text arrives via
    /// fetch_once. Results must respect the date filter.
    virtual std::vector<PaperRecord> search_once(const std::string& query,
                                                 const DateRange& date_filter, int result_cap) = 0;

    /// Absence (no open-access text) is a value, not an error.
    virtual std::optional<std::string> fetch_once(const std::string& paper_id) = 0;

    /// Resolve a bare identifier (e.g. one mined from a reference list) to a
    /// metadata stub.
    virtual std::optional<PaperRecord> lookup_once(const std::string& paper_id) = 0;

    virtual std::string name() const = 0;
};

}  // namespace theorygen
