#include "theorygen/harness/config.hpp"

#include <fstream>
#include <sstream>

namespace theorygen {

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["knowledge_window"] = window.to_json();
    j["corpus_target_size"] = corpus_target_size;
    j["evidence_token_budget"] = evidence_token_budget;
    j["theories_per_query"] = theories_per_query;
    j["extraction_chunk_chars"] = extraction_chunk_chars;
    j["belief_samples"] = belief_samples;
    j["judge_resamples"] = judge_resamples;
    j["backtest_resamples"] = backtest_resamples;
    j["backtest_search_cap"] = backtest_search_cap;
    j["novelty_sample_size"] = novelty_sample_size;
    json degrees = json::array();
    for (const auto& d : novel_degrees) degrees.push_back(std::string(to_string(d)));
    j["novel_degrees"] = degrees;
    j["overlap_n_values"] = overlap_n_values;
    j["overlap_samples_per_point"] = overlap_samples_per_point;
    j["parallelism"] = parallelism;
    j["gateway_mode"] = gateway_mode == GatewayMode::mock ? "mock" : "http";
    j["mock_corpus_file"] = mock_corpus_file.string();
    j["mock_script_file"] = mock_script_file.string();
    json http_j;
    http_j["chat_base_url"] = http.chat_base_url;
    http_j["search_base_url"] = http.search_base_url;
    http_j["chat_api_key_env"] = http.chat_api_key_env;
    http_j["search_api_key_env"] = http.search_api_key_env;
    j["http"] = http_j;
    j["prices"] = prices.to_json();
    json retry_j;
    retry_j["max_attempts"] = retry.max_attempts;
    retry_j["base_delay_ms"] = retry.base_delay_ms;
    retry_j["max_delay_ms"] = retry.max_delay_ms;
    retry_j["jitter"] = retry.jitter;
    j["retry"] = retry_j;
    j["requests_per_second"] = requests_per_second;
    j["burst"] = burst;
    json models_j = json::object();
    for (const auto& [stage, model] : models) models_j[stage] = model;
    j["models"] = models_j;
    j["default_model"] = default_model;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;  // field defaults stand for anything the file omits
    JsonReader r(j, "RunConfig");
    if (const json* v = r.find("seed")) c.seed = v->get<std::uint64_t>();
    if (const json* v = r.find("knowledge_window")) c.window = KnowledgeWindow::from_json(*v);
    if (const json* v = r.find("corpus_target_size")) c.corpus_target_size = v->get<int>();
    if (const json* v = r.find("evidence_token_budget")) c.evidence_token_budget = v->get<long>();
    if (const json* v = r.find("theories_per_query")) c.theories_per_query = v->get<int>();
    if (const json* v = r.find("extraction_chunk_chars")) {
        c.extraction_chunk_chars = v->get<std::size_t>();
    }
    if (const json* v = r.find("belief_samples")) c.belief_samples = v->get<int>();
    if (const json* v = r.find("judge_resamples")) c.judge_resamples = v->get<long>();
    if (const json* v = r.find("backtest_resamples")) c.backtest_resamples = v->get<long>();
    if (const json* v = r.find("backtest_search_cap")) c.backtest_search_cap = v->get<int>();
    if (const json* v = r.find("novelty_sample_size")) c.novelty_sample_size = v->get<int>();
    if (const json* v = r.find("novel_degrees")) {
        c.novel_degrees.clear();
        for (const auto& e : *v) c.novel_degrees.insert(parse_novelty_degree(e.get<std::string>()));
    }
    if (const json* v = r.find("overlap_n_values")) {
        c.overlap_n_values = v->get<std::vector<int>>();
    }
    if (const json* v = r.find("overlap_samples_per_point")) {
        c.overlap_samples_per_point = v->get<int>();
    }
    if (const json* v = r.find("parallelism")) c.parallelism = v->get<int>();
    if (const json* v = r.find("gateway_mode")) {
        std::string mode = v->get<std::string>();
        if (mode == "mock") {
            c.gateway_mode = GatewayMode::mock;
        } else if (mode == "http") {
            c.gateway_mode = GatewayMode::http;
        } else {
            throw ValidationError("gateway_mode must be 'mock' or 'http'");
        }
    }
    if (const json* v = r.find("mock_corpus_file")) c.mock_corpus_file = v->get<std::string>();
    if (const json* v = r.find("mock_script_file")) c.mock_script_file = v->get<std::string>();
    if (const json* v = r.find("http")) {
        JsonReader hr(*v, "RunConfig.http");
        c.http.chat_base_url = hr.string_or("chat_base_url", c.http.chat_base_url);
        c.http.search_base_url = hr.string_or("search_base_url", c.http.search_base_url);
        c.http.chat_api_key_env = hr.string_or("chat_api_key_env", c.http.chat_api_key_env);
        c.http.search_api_key_env = hr.string_or("search_api_key_env", c.http.search_api_key_env);
    }
    if (const json* v = r.find("prices")) c.prices = PriceTable::from_json(*v);
    if (const json* v = r.find("retry")) {
        JsonReader rr(*v, "RunConfig.retry");
        if (const json* f = rr.find("max_attempts")) c.retry.max_attempts = f->get<int>();
        if (const json* f = rr.find("base_delay_ms")) c.retry.base_delay_ms = f->get<int>();
        if (const json* f = rr.find("max_delay_ms")) c.retry.max_delay_ms = f->get<int>();
        if (const json* f = rr.find("jitter")) c.retry.jitter = f->get<double>();
    }
    if (const json* v = r.find("requests_per_second")) c.requests_per_second = v->get<double>();
    if (const json* v = r.find("burst")) c.burst = v->get<double>();
    if (const json* v = r.find("models")) {
        for (auto it = v->begin(); it != v->end(); ++it) {
            c.models[it.key()] = it.value().get<std::string>();
        }
    }
    if (const json* v = r.find("default_model")) c.default_model = v->get<std::string>();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open config file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(parse_json(buf.str()));
}

GatewayConfig RunConfig::gateway_config(const std::filesystem::path& cache_dir) const {
    GatewayConfig g;
    g.prices = prices;
    g.retry = retry;
    g.requests_per_second = requests_per_second;
    g.burst = burst;
    g.models = models;
    g.default_model = default_model;
    g.cache_dir = cache_dir;
    g.seed = seed;
    return g;
}

}  // namespace theorygen
