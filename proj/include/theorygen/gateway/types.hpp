#pragma once

#include <map>
#include <string>
#include <vector>

#include "theorygen/core/json_util.hpp"

namespace theorygen {

enum class ResponseContract { free_text, structured };

/// A model call. `prompt_asset_id` names a versioned template in the prompt
/// library; all of the template's placeholders must be bound by `variables`.
struct ChatRequest {
    std::string prompt_asset_id;
    std::map<std::string, std::string> variables;
    double temperature = 0.0;  // [0, 2]
    int max_output_tokens = 4096;
    ResponseContract response_contract = ResponseContract::free_text;
    /// Top-level fields a structured response must contain. Violations are
    /// reprompted once, then fail.
    std::vector<std::string> required_fields;
    /// Pipeline stage for ledger attribution and per-stage model selection.
    std::string stage;

    void validate() const;

    /// Stable digest over (asset, variables, temperature, contract); cache and
    /// mock-script key.
    std::string digest() const;
};

struct Usage {
    long input_tokens = 0;
    long output_tokens = 0;
};

struct ChatResponse {
    std::string text;
    Usage usage;
    std::string model_id;
};

struct BeliefEstimate {
    std::vector<bool> votes;
    int n_requested = 0;
    int n_effective = 0;  // samples that survived retries
    double estimate = 0.0;  // mean of votes
};

}  // namespace theorygen
