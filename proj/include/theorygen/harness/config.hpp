#pragma once

#include <filesystem>

#include "theorygen/gateway/gateway.hpp"
#include "theorygen/gateway/http_provider.hpp"
#include "theorygen/novelty/novelty.hpp"

namespace theorygen {

enum class GatewayMode { mock, http };

/// One declarative run configuration: models per stage, retrieval size K,
/// token budget, prices, rate limits, sample sizes, resample counts. CLI flags
/// override individual fields; the config digest pins the effective values in
/// the run manifest.
struct RunConfig {
    std::uint64_t seed = 42;
    KnowledgeWindow window{Date{2024, 6, 30}, Date{2025, 6, 30}, Date{2025, 12, 31}};

    int corpus_target_size = 100;  // K
    long evidence_token_budget = 60000;
    int theories_per_query = 8;
    std::size_t extraction_chunk_chars = 120000;

    int belief_samples = 10;
    long judge_resamples = 10000;
    long backtest_resamples = 1000;
    int backtest_search_cap = 25;
    int novelty_sample_size = 100;
    std::set<NoveltyDegree> novel_degrees = default_novel_degrees();

    std::vector<int> overlap_n_values = {1, 5, 10, 20, 40};
    int overlap_samples_per_point = 50;

    /// 1 keeps stage-internal execution (and the ledger file) byte-
    /// deterministic; higher values parallelize independent tasks.
    int parallelism = 1;

    GatewayMode gateway_mode = GatewayMode::mock;
    std::filesystem::path mock_corpus_file;  // fixture paper index
    std::filesystem::path mock_script_file;  // canned response table (optional)
    HttpProviderConfig http;

    PriceTable prices;
    RetryPolicy retry;
    double requests_per_second = 0.0;
    double burst = 16.0;
    std::map<std::string, std::string> models;
    std::string default_model = "general-model";

    json to_json() const;
    static RunConfig from_json(const json& j);
    static RunConfig load(const std::filesystem::path& file);

    std::string digest() const { return json_digest(to_json()); }

    GatewayConfig gateway_config(const std::filesystem::path& cache_dir) const;
};

}  // namespace theorygen
