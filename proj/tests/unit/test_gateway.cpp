#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <thread>

#include <httplib.h>

#include "test_support.hpp"
#include "theorygen/core/text.hpp"
#include "theorygen/gateway/http_provider.hpp"

using namespace theorygen;
using theorygen::testing::MockGatewayBuilder;

namespace {

ChatRequest basic_request(const std::string& query_text) {
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::reformulate_query;
    request.variables["query_text"] = query_text;
    request.temperature = 0.0;
    request.stage = "discovery";
    return request;
}

/// Scriptable failing provider for retry-path tests.
class FlakyProvider : public Provider {
public:
    int fail_first_n = 0;
    bool transient = true;
    std::atomic<int> calls{0};

    ChatResponse chat_once(const std::string& rendered, const ChatRequest&,
                           const std::string& model_id) override {
        int call = ++calls;
        if (call <= fail_first_n) throw ProviderError("synthetic failure", transient);
        ChatResponse r;
        r.text = "ok after " + std::to_string(call);
        r.usage = {estimate_tokens(rendered), 4};
        r.model_id = model_id;
        return r;
    }
    std::vector<PaperRecord> search_once(const std::string&, const DateRange&, int) override {
        int call = ++calls;
        if (call <= fail_first_n) throw ProviderError("search outage", transient);
        return {};
    }
    std::optional<std::string> fetch_once(const std::string&) override { return std::nullopt; }
    std::optional<PaperRecord> lookup_once(const std::string&) override { return std::nullopt; }
    std::string name() const override { return "flaky"; }
};

struct FlakyGateway {
    FlakyProvider* provider;
    std::unique_ptr<Gateway> gateway;
};

FlakyGateway make_flaky(int fail_first_n, bool transient, int max_attempts = 5) {
    auto provider = std::make_unique<FlakyProvider>();
    provider->fail_first_n = fail_first_n;
    provider->transient = transient;
    FlakyProvider* raw = provider.get();
    GatewayConfig config;
    config.retry.max_attempts = max_attempts;
    config.retry.base_delay_ms = 0;
    config.retry.max_delay_ms = 0;
    return {raw, std::make_unique<Gateway>(config, std::move(provider))};
}

}  // namespace

TEST_CASE("mock gateway replays byte-identically under a fixed seed") {
    auto gw1 = MockGatewayBuilder{}.build();
    auto gw2 = MockGatewayBuilder{}.build();
    ChatRequest request = basic_request("Build a theory of conversational scaffolding.");
    CHECK(gw1->chat(request).text == gw2->chat(request).text);
    // and the same request twice within one gateway
    auto gw3 = MockGatewayBuilder{}.build();
    CHECK(gw3->chat(request).text == gw3->chat(request).text);

    auto gw_other_seed = MockGatewayBuilder{.seed = 8}.build();
    ChatRequest synth;
    synth.prompt_asset_id = prompt_assets::synthesize_theories;
    synth.variables = {{"query_text", "Build a theory of margins."},
                       {"knowledge", "parametric"},
                       {"objective", "accuracy"},
                       {"theories_requested", "2"},
                       {"evidence_text", "(none)"}};
    synth.response_contract = ResponseContract::structured;
    synth.required_fields = {"theories"};
    synth.stage = "synthesis-parametric";
    auto gw4 = MockGatewayBuilder{}.build();
    CHECK(gw4->chat(synth).text != gw_other_seed->chat(synth).text);
}

TEST_CASE("unbound placeholders are rejected before any provider activity") {
    auto gateway = MockGatewayBuilder{}.build();
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::reformulate_query;
    request.stage = "discovery";  // query_text left unbound
    CHECK_THROWS_AS(gateway->chat(request), ValidationError);
    CHECK(gateway->ledger().size() == 0);
}

TEST_CASE("ledger entries price tokens exactly") {
    PriceTable prices;
    prices.usd_per_token["general-model"] = {2e-6, 8e-6};
    CostLedger ledger(prices);
    LedgerEntry entry = ledger.append("judge", "general-model", {1000, 500});
    CHECK(entry.usd == 1000 * 2e-6 + 500 * 8e-6);
    CHECK(entry.usd == doctest::Approx(0.006).epsilon(1e-12));

    ledger.append("judge", "general-model", {100, 10});
    ledger.append("overlap", "general-model", {7, 3});
    // total equals the sum of entries; per-stage subtotals match their entries
    double stage_sum = 0.0, total = 0.0;
    for (const auto& e : ledger.entries()) {
        total += e.usd;
        if (e.stage == "judge") stage_sum += e.usd;
    }
    CHECK(ledger.total_usd() == total);
    CHECK(ledger.stage_total_usd("judge") == stage_sum);
    CHECK(ledger.stage_call_count("judge") == 2);

    // unknown models are unpriced, never an error
    CHECK(ledger.append("judge", "mystery-model", {10, 10}).usd == 0.0);

    CHECK_THROWS_AS(ledger.append("judge", "general-model", {-1, 0}), ValidationError);
}

TEST_CASE("ledger round-trips through jsonl") {
    CostLedger ledger;
    ledger.append_entry({"judge", "m", 10, 5, 0.001});
    ledger.append_entry({"overlap", "m", 3, 2, 0.0});
    std::string text = ledger.to_jsonl();
    CostLedger back = CostLedger::from_jsonl(text, {});
    CHECK(back.size() == 2);
    CHECK(back.to_jsonl() == text);
}

TEST_CASE("exactly one ledger entry per successful provider call, none on cache hits") {
    auto gateway = MockGatewayBuilder{}.build();
    ChatRequest request = basic_request("Build a theory of probe anchors.");
    gateway->chat(request);
    CHECK(gateway->ledger().size() == 1);
    gateway->chat(request);  // served from cache
    CHECK(gateway->ledger().size() == 1);

    ChatRequest other = basic_request("Build a theory of margin overlap.");
    gateway->chat(other);
    CHECK(gateway->ledger().size() == 2);
}

TEST_CASE("transient failures retry with a bounded attempt budget") {
    SUBCASE("recovers within the budget, one ledger entry") {
        auto flaky = make_flaky(2, /*transient=*/true);
        ChatRequest request = basic_request("anything");
        ChatResponse response = flaky.gateway->chat(request);
        CHECK(flaky.provider->calls == 3);
        CHECK(response.text == "ok after 3");
        CHECK(flaky.gateway->ledger().size() == 1);
    }
    SUBCASE("exhausts the budget and reports attempt history") {
        auto flaky = make_flaky(99, /*transient=*/true, /*max_attempts=*/4);
        try {
            flaky.gateway->chat(basic_request("anything"));
            FAIL("expected GatewayError");
        } catch (const GatewayError& e) {
            CHECK(e.attempts.size() == 4);
            CHECK(flaky.provider->calls == 4);
        }
        CHECK(flaky.gateway->ledger().size() == 0);
    }
    SUBCASE("permanent errors do not retry") {
        auto flaky = make_flaky(99, /*transient=*/false);
        CHECK_THROWS_AS(flaky.gateway->chat(basic_request("anything")), GatewayError);
        CHECK(flaky.provider->calls == 1);
    }
    SUBCASE("search outages retry and differ from empty results") {
        auto flaky = make_flaky(1, /*transient=*/true);
        auto results = flaky.gateway->search_papers("query", {}, 10);
        CHECK(results.empty());
        CHECK(flaky.provider->calls == 2);
    }
}

TEST_CASE("structured responses are validated and reprompted once") {
    SUBCASE("bad then good: reprompt recovers") {
        MockScript script;
        // the retry request carries __contract_retry and hits the good entry first
        script.add({prompt_assets::generate_schema, "",
                    {{"query_text", "trigger-flaky-schema"}, {"__contract_retry", "1"}},
                    R"({"extraction_query": "q", "slots": [
                        {"name": "alpha", "description": "a"},
                        {"name": "beta", "description": "b"},
                        {"name": "gamma", "description": "c"}]})"});
        script.add({prompt_assets::generate_schema, "",
                    {{"query_text", "trigger-flaky-schema"}},
                    "this is not json"});
        auto gateway = MockGatewayBuilder{.extra_script = script}.build();

        ChatRequest request;
        request.prompt_asset_id = prompt_assets::generate_schema;
        request.variables["query_text"] = "trigger-flaky-schema";
        request.response_contract = ResponseContract::structured;
        request.required_fields = {"extraction_query", "slots"};
        request.stage = "extraction";
        json j = parse_json(gateway->chat(request).text);
        CHECK(j["slots"].size() == 3);
        CHECK(gateway->ledger().size() == 2);  // both provider calls were real
    }
    SUBCASE("persistently invalid: ContractViolation after one reprompt") {
        MockScript script;
        script.add({prompt_assets::generate_schema, "",
                    {{"query_text", "trigger-always-bad"}},
                    "still not json"});
        auto gateway = MockGatewayBuilder{.extra_script = script}.build();

        ChatRequest request;
        request.prompt_asset_id = prompt_assets::generate_schema;
        request.variables["query_text"] = "trigger-always-bad";
        request.response_contract = ResponseContract::structured;
        request.required_fields = {"extraction_query", "slots"};
        request.stage = "extraction";
        CHECK_THROWS_AS(gateway->chat(request), ContractViolation);
    }
}

TEST_CASE("search respects date filters; fetch treats absence as a value") {
    auto gateway = MockGatewayBuilder{}.build();

    // within the generation window, the replication paper from the holdout
    // period must not surface
    DateRange generation{std::nullopt, Date{2025, 6, 30}};
    auto results = gateway->search_papers("conversational scaffolding tutoring", generation, 50);
    CHECK(!results.empty());
    for (const auto& p : results) CHECK_FALSE(Date{2025, 6, 30} < p.publication_date);

    // oracle: a linear scan of the fixture index with the same filter
    MockIndex index = MockIndex::load(theorygen::testing::fixture_path("papers.json"));
    long expected = 0;
    for (const auto& p : index.papers()) {
        if (!generation.contains(p.publication_date)) continue;
        if (lexical_overlap("conversational scaffolding tutoring",
                            p.title + " " + p.full_text) > 0.0) {
            ++expected;
        }
    }
    CHECK(static_cast<long>(results.size()) == expected);

    CHECK(gateway->fetch_full_text("p001").has_value());
    CHECK_FALSE(gateway->fetch_full_text("p007").has_value());  // no open-access text
    CHECK_FALSE(gateway->fetch_full_text("no-such-paper").has_value());

    // repeated fetches come from the cache: zero new ledger entries either way
    std::size_t before = gateway->ledger().size();
    gateway->fetch_full_text("p001");
    gateway->fetch_full_text("p001");
    CHECK(gateway->ledger().size() == before);
}

TEST_CASE("self-belief sampling returns the vote mean") {
    auto gateway = MockGatewayBuilder{}.build();
    BeliefEstimate belief = gateway->self_belief_samples("some law statement", 10, "self-belief");
    CHECK(belief.n_requested == 10);
    CHECK(belief.n_effective == 10);
    long yes = std::count(belief.votes.begin(), belief.votes.end(), true);
    CHECK(belief.estimate == static_cast<double>(yes) / 10.0);
    CHECK(belief.estimate >= 0.0);
    CHECK(belief.estimate <= 1.0);

    SUBCASE("scripted all-true votes give estimate 1.0") {
        MockScript script;
        script.add({prompt_assets::self_belief_vote, "", {{"claim", "always-true-claim"}},
                    R"({"vote": true})"});
        auto scripted = MockGatewayBuilder{.extra_script = script}.build();
        BeliefEstimate sure = scripted->self_belief_samples("always-true-claim", 10, "self-belief");
        CHECK(sure.estimate == 1.0);
    }
    SUBCASE("scripted 8-of-10 votes give estimate 0.8") {
        MockScript script;
        for (int i = 0; i < 10; ++i) {
            script.add({prompt_assets::self_belief_vote, "",
                        {{"claim", "mostly-true-claim"}, {"sample_index", std::to_string(i)}},
                        i < 8 ? R"({"vote": true})" : R"({"vote": false})"});
        }
        auto scripted = MockGatewayBuilder{.extra_script = script}.build();
        BeliefEstimate mostly =
            scripted->self_belief_samples("mostly-true-claim", 10, "self-belief");
        CHECK(mostly.estimate == 0.8);
    }
}

TEST_CASE("rate limiter enforces the bucket") {
    RateLimiter limiter(1000.0, 3.0);
    CHECK(limiter.try_acquire());
    CHECK(limiter.try_acquire());
    CHECK(limiter.try_acquire());
    // burst exhausted; 1000/s refills within a few ms
    bool fourth = limiter.try_acquire();
    if (!fourth) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        CHECK(limiter.try_acquire());
    }
    RateLimiter unlimited(0.0, 1.0);
    for (int i = 0; i < 100; ++i) CHECK(unlimited.try_acquire());
}

TEST_CASE("http provider speaks the chat/search/fetch protocol") {
    httplib::Server server;
    std::atomic<int> chat_failures{2};

    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (chat_failures-- > 0) {
            res.status = 503;
            return;
        }
        json body = json::parse(req.body);
        json reply;
        reply["model"] = body["model"];
        reply["choices"] =
            json::array({json{{"message", json{{"content", "echo: " +
                                                 body["messages"][0]["content"].get<std::string>().substr(0, 10)}}}}});
        reply["usage"] = json{{"prompt_tokens", 21}, {"completion_tokens", 7}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/v1/paper-search", [&](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body);
        json paper;
        paper["paper_id"] = "remote-1";
        paper["title"] = "Remote result for " + body["query"].get<std::string>();
        paper["authors"] = json::array();
        paper["publication_date"] = "2025-08-01";
        paper["venue"] = "RemoteVenue";
        paper["full_text"] = "";
        json reply;
        reply["results"] = json::array({paper});
        res.set_content(reply.dump(), "application/json");
    });
    server.Get("/v1/papers/remote-1/fulltext", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("full text body", "text/plain");
    });
    server.Get("/v1/papers/gone/fulltext", [](const httplib::Request&, httplib::Response& res) {
        res.status = 404;
    });

    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpProviderConfig pcfg;
    pcfg.chat_base_url = "http://127.0.0.1:" + std::to_string(port);
    GatewayConfig gcfg;
    gcfg.retry.base_delay_ms = 0;
    gcfg.retry.max_delay_ms = 0;
    gcfg.prices.usd_per_token["general-model"] = {1e-6, 2e-6};
    Gateway gateway(gcfg, std::make_unique<HttpProvider>(pcfg));

    // two 503s, then success: the retry loop recovers and bills once
    ChatRequest request = basic_request("Build a theory of remote calls.");
    ChatResponse response = gateway.chat(request);
    CHECK(response.text.rfind("echo: ", 0) == 0);
    CHECK(gateway.ledger().size() == 1);
    CHECK(gateway.ledger().entries()[0].input_tokens == 21);
    CHECK(gateway.ledger().entries()[0].output_tokens == 7);

    auto results = gateway.search_papers("remote query", {std::nullopt, Date{2025, 12, 31}}, 5);
    REQUIRE(results.size() == 1);
    CHECK(results[0].paper_id == "remote-1");

    CHECK(gateway.fetch_full_text("remote-1") == std::string("full text body"));
    CHECK_FALSE(gateway.fetch_full_text("gone").has_value());

    server.stop();
    server_thread.join();
}
