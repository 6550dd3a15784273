#include "theorygen/gateway/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>

#include "theorygen/core/json_util.hpp"

namespace theorygen {

namespace {

std::string env_or_empty(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    return v ? v : "";
}

httplib::Headers auth_headers(const std::string& key) {
    httplib::Headers h;
    if (!key.empty()) h.emplace("Authorization", "Bearer " + key);
    return h;
}

[[noreturn]] void raise_http(const std::string& what, int status) {
    bool transient = status == 429 || status >= 500;
    throw ProviderError(what + " (HTTP " + std::to_string(status) + ")", transient);
}

[[noreturn]] void raise_transport(const std::string& what, httplib::Error err) {
    throw ProviderError(what + ": " + std::string(httplib::to_string(err)),
                        /*is_transient=*/true);
}

}  // namespace

struct HttpProvider::Impl {
    HttpProviderConfig config;
    httplib::Client chat_client;
    httplib::Client search_client;
    std::string chat_key;
    std::string search_key;

    explicit Impl(HttpProviderConfig cfg)
        : config(std::move(cfg)),
          chat_client(config.chat_base_url),
          search_client(config.search_base_url.empty() ? config.chat_base_url
                                                       : config.search_base_url),
          chat_key(env_or_empty(config.chat_api_key_env)),
          search_key(env_or_empty(config.search_api_key_env)) {
        chat_client.set_read_timeout(config.timeout_seconds, 0);
        search_client.set_read_timeout(config.timeout_seconds, 0);
    }
};

HttpProvider::HttpProvider(HttpProviderConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpProvider::~HttpProvider() = default;

ChatResponse HttpProvider::chat_once(const std::string& rendered_prompt,
                                     const ChatRequest& request, const std::string& model_id) {
    json body;
    body["model"] = model_id;
    body["messages"] = json::array({json{{"role", "user"}, {"content", rendered_prompt}}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;

    auto res = impl_->chat_client.Post(impl_->config.chat_path, auth_headers(impl_->chat_key),
                                       body.dump(), "application/json");
    if (!res) raise_transport("chat request failed", res.error());
    if (res->status < 200 || res->status >= 300) raise_http("chat request rejected", res->status);

    json j = parse_json(res->body);
    ChatResponse response;
    try {
        response.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        response.model_id = j.value("model", model_id);
        if (j.contains("usage")) {
            response.usage.input_tokens = j["usage"].value("prompt_tokens", 0L);
            response.usage.output_tokens = j["usage"].value("completion_tokens", 0L);
        }
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed chat completion payload: ") + e.what(),
                            /*is_transient=*/false);
    }
    return response;
}

std::vector<PaperRecord> HttpProvider::search_once(const std::string& query,
                                                   const DateRange& date_filter, int result_cap) {
    json body;
    body["query"] = query;
    if (date_filter.from) body["from"] = date_filter.from->to_string();
    if (date_filter.to) body["to"] = date_filter.to->to_string();
    body["limit"] = result_cap;

    auto res = impl_->search_client.Post(impl_->config.search_path,
                                         auth_headers(impl_->search_key), body.dump(),
                                         "application/json");
    if (!res) raise_transport("paper search failed", res.error());
    if (res->status < 200 || res->status >= 300) raise_http("paper search rejected", res->status);

    json j = parse_json(res->body);
    std::vector<PaperRecord> out;
    for (const auto& e : j.value("results", json::array())) {
        out.push_back(PaperRecord::from_json(e));
    }
    return out;
}

std::optional<std::string> HttpProvider::fetch_once(const std::string& paper_id) {
    auto res = impl_->search_client.Get(impl_->config.paper_path_prefix + paper_id + "/fulltext",
                                        auth_headers(impl_->search_key));
    if (!res) raise_transport("full-text fetch failed", res.error());
    if (res->status == 404) return std::nullopt;  // no open-access text
    if (res->status < 200 || res->status >= 300) raise_http("full-text fetch rejected", res->status);
    return res->body;
}

std::optional<PaperRecord> HttpProvider::lookup_once(const std::string& paper_id) {
    auto res = impl_->search_client.Get(impl_->config.paper_path_prefix + paper_id,
                                        auth_headers(impl_->search_key));
    if (!res) raise_transport("paper lookup failed", res.error());
    if (res->status == 404) return std::nullopt;
    if (res->status < 200 || res->status >= 300) raise_http("paper lookup rejected", res->status);
    return PaperRecord::from_json(parse_json(res->body));
}

}  // namespace theorygen
