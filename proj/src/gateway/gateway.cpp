#include "theorygen/gateway/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "theorygen/core/log.hpp"
#include "theorygen/core/rng.hpp"

namespace theorygen {

Gateway::Gateway(GatewayConfig config, std::unique_ptr<Provider> provider)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      ledger_(config_.prices),
      cache_(config_.cache_dir),
      rate_(config_.requests_per_second, config_.burst) {}

std::string Gateway::model_for(const std::string& stage) const {
    auto it = config_.models.find(stage);
    return it != config_.models.end() ? it->second : config_.default_model;
}

void Gateway::backoff_sleep(int attempt, std::uint64_t jitter_key) {
    double delay = config_.retry.base_delay_ms * std::pow(2.0, attempt - 1);
    delay = std::min(delay, static_cast<double>(config_.retry.max_delay_ms));
    Rng rng(derive_seed(jitter_key, "backoff", static_cast<std::uint64_t>(attempt)));
    delay *= 1.0 + config_.retry.jitter * rng.unit();
    if (delay > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
    }
}

ChatResponse Gateway::chat_attempt_loop(const std::string& rendered, const ChatRequest& request,
                                        const std::string& model_id) {
    std::vector<std::string> history;
    std::uint64_t jitter_key = fnv1a64(request.digest());
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        try {
            rate_.acquire();
            ChatResponse response = provider_->chat_once(rendered, request, model_id);
            ledger_.append(request.stage, response.model_id, response.usage);
            return response;
        } catch (const ProviderError& e) {
            history.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
            if (!e.transient) {
                throw GatewayError("permanent provider error in stage '" + request.stage +
                                       "': " + e.what(),
                                   std::move(history));
            }
            if (attempt < config_.retry.max_attempts) backoff_sleep(attempt, jitter_key);
        }
    }
    throw GatewayError(
        "provider failed after " + std::to_string(config_.retry.max_attempts) +
            " attempts in stage '" + request.stage + "'",
        std::move(history));
}

std::string Gateway::validate_structured(const ChatRequest& request,
                                         const std::string& text) const {
    json parsed;
    try {
        parsed = parse_json(text);
    } catch (const ParseError& e) {
        return std::string("response is not valid JSON: ") + e.what();
    }
    if (!parsed.is_object()) return "response is not a JSON object";
    for (const auto& field : request.required_fields) {
        if (!parsed.contains(field)) return "response is missing field '" + field + "'";
    }
    return {};
}

ChatResponse Gateway::chat(const ChatRequest& request) {
    request.validate();
    std::string rendered = prompts_.render(request);  // rejects unbound placeholders up front
    std::string model_id = model_for(request.stage);

    std::string cache_key = "chat-" + model_id + "-" + request.digest();
    if (auto cached = cache_.get(cache_key)) {
        json j = parse_json(*cached);
        ChatResponse response;
        response.text = j["text"].get<std::string>();
        response.usage.input_tokens = j["input_tokens"].get<long>();
        response.usage.output_tokens = j["output_tokens"].get<long>();
        response.model_id = j["model_id"].get<std::string>();
        return response;
    }

    ChatResponse response = chat_attempt_loop(rendered, request, model_id);

    if (request.response_contract == ResponseContract::structured) {
        std::string problem = validate_structured(request, response.text);
        if (!problem.empty()) {
            log_warn("structured response violation (" + request.prompt_asset_id +
                     "), reprompting once: " + problem);
            ChatRequest retry = request;
            retry.variables["__contract_retry"] = "1";
            retry.variables["__contract_error"] = problem;
            std::string retry_rendered = prompts_.render(retry);
            response = chat_attempt_loop(retry_rendered, retry, model_id);
            problem = validate_structured(request, response.text);
            if (!problem.empty()) {
                throw ContractViolation("structured response still invalid after reprompt (" +
                                        request.prompt_asset_id + "): " + problem);
            }
        }
    }

    json cached;
    cached["text"] = response.text;
    cached["input_tokens"] = response.usage.input_tokens;
    cached["output_tokens"] = response.usage.output_tokens;
    cached["model_id"] = response.model_id;
    cache_.put(cache_key, cached.dump());
    return response;
}

std::vector<PaperRecord> Gateway::search_papers(const std::string& query,
                                                const DateRange& date_filter, int result_cap) {
    if (query.empty()) throw ValidationError("search query must be non-empty");
    std::vector<std::string> history;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        try {
            rate_.acquire();
            auto results = provider_->search_once(query, date_filter, result_cap);
            // providers are expected to filter; enforce the window regardless
            std::erase_if(results, [&](const PaperRecord& p) {
                return !date_filter.contains(p.publication_date);
            });
            if (static_cast<int>(results.size()) > result_cap) results.resize(result_cap);
            return results;
        } catch (const ProviderError& e) {
            history.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
            if (!e.transient) throw GatewayError(e.what(), std::move(history));
            if (attempt < config_.retry.max_attempts) {
                backoff_sleep(attempt, fnv1a64(query));
            }
        }
    }
    throw GatewayError("paper search failed after retries: " + query, std::move(history));
}

std::optional<std::string> Gateway::fetch_full_text(const std::string& paper_id) {
    std::string cache_key = "fetch-" + sha256_hex(paper_id);
    if (auto cached = cache_.get(cache_key)) {
        json j = parse_json(*cached);
        if (!j["present"].get<bool>()) return std::nullopt;
        return j["text"].get<std::string>();
    }
    std::vector<std::string> history;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        try {
            rate_.acquire();
            auto text = provider_->fetch_once(paper_id);
            json j;
            j["present"] = text.has_value();
            j["text"] = text.value_or("");
            cache_.put(cache_key, j.dump());
            return text;
        } catch (const ProviderError& e) {
            history.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
            if (!e.transient) throw GatewayError(e.what(), std::move(history));
            if (attempt < config_.retry.max_attempts) {
                backoff_sleep(attempt, fnv1a64(paper_id));
            }
        }
    }
    throw GatewayError("full-text fetch failed after retries: " + paper_id, std::move(history));
}

std::optional<PaperRecord> Gateway::lookup_paper(const std::string& paper_id) {
    rate_.acquire();
    return provider_->lookup_once(paper_id);
}

BeliefEstimate Gateway::self_belief_samples(const std::string& claim, int n,
                                            const std::string& stage) {
    if (n < 1) throw ValidationError("belief sampling needs n >= 1");
    BeliefEstimate estimate;
    estimate.n_requested = n;
    for (int i = 0; i < n; ++i) {
        ChatRequest request;
        request.prompt_asset_id = prompt_assets::self_belief_vote;
        request.variables["claim"] = claim;
        request.variables["sample_index"] = std::to_string(i);
        request.temperature = 1.0;
        request.response_contract = ResponseContract::structured;
        request.required_fields = {"vote"};
        request.stage = stage;
        try {
            ChatResponse response = chat(request);
            json j = parse_json(response.text);
            if (!j["vote"].is_boolean()) continue;  // excluded, reported via n_effective
            estimate.votes.push_back(j["vote"].get<bool>());
        } catch (const GatewayError& e) {
            log_warn("belief sample " + std::to_string(i) + " failed: " + e.what());
        } catch (const ContractViolation& e) {
            log_warn("belief sample " + std::to_string(i) + " failed: " + e.what());
        }
    }
    estimate.n_effective = static_cast<int>(estimate.votes.size());
    long yes = std::count(estimate.votes.begin(), estimate.votes.end(), true);
    estimate.estimate = estimate.n_effective > 0
                            ? static_cast<double>(yes) / estimate.n_effective
                            : 0.0;
    return estimate;
}

}  // namespace theorygen
