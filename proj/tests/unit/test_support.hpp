#pragma once

// Shared fixtures and randomized-instance generators for the unit tests.

#include <filesystem>
#include <memory>
#include <string>

#include "theorygen/core/rng.hpp"
#include "theorygen/core/types.hpp"
#include "theorygen/gateway/gateway.hpp"
#include "theorygen/gateway/mock.hpp"

namespace theorygen::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(THEORYGEN_FIXTURE_DIR) / name;
}

struct MockGatewayBuilder {
    std::uint64_t seed = 7;
    bool with_corpus = true;
    bool with_script = true;
    int theories_per_call = 3;
    MockScript extra_script;  // prepended entries win over the fixture file

    std::unique_ptr<Gateway> build() const {
        MockIndex index;
        if (with_corpus) index = MockIndex::load(fixture_path("papers.json"));
        MockScript script = extra_script;  // programmatic entries win (first match)
        if (with_script) {
            for (const auto& e : MockScript::load(fixture_path("mock_script.json")).entries()) {
                script.add(e);
            }
        }
        MockOptions options;
        options.seed = seed;
        options.default_theories_per_call = theories_per_call;

        GatewayConfig config;
        config.prices.usd_per_token["general-model"] = {2e-6, 8e-6};
        config.retry.base_delay_ms = 0;
        config.retry.max_delay_ms = 0;
        config.seed = seed;
        return std::make_unique<Gateway>(
            config, std::make_unique<MockProvider>(std::move(index), std::move(script), options));
    }
};

// ---------------------------------------------------------------------------
// randomized domain instances (for round-trip and invariant property tests)

inline std::string random_word(Rng& rng) {
    static const char* words[] = {"signal",  "transfer", "scaffold", "gradient", "margin",
                                  "overlap", "context",  "probe",    "budget",   "anchor"};
    return words[rng.below(std::size(words))];
}

inline std::string random_sentence(Rng& rng, std::size_t n_words = 6) {
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        out += (i ? " " : "") + random_word(rng);
    }
    return out + ".";
}

inline SelfNoveltyAssessment random_self_novelty(Rng& rng) {
    SelfNoveltyAssessment a;
    a.what_exists = random_sentence(rng);
    a.what_is_novel = random_sentence(rng);
    a.classification_explanation = random_sentence(rng);
    a.classification = static_cast<SelfNoveltyLabel>(rng.below(4));
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) {
        a.llm_generated_refs.push_back(random_sentence(rng, 3));
    }
    return a;
}

inline Law random_law(Rng& rng) {
    Law law;
    law.name = random_word(rng) + " law";
    law.statement = random_sentence(rng, 10);
    law.law_type = rng.below(2) ? LawType::quantitative : LawType::qualitative;
    law.scope = random_sentence(rng);
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) {
        law.special_cases.push_back(random_sentence(rng));
    }
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) {
        EvidenceRef ref;
        ref.description = random_sentence(rng);
        for (std::uint64_t k = 0, m = 1 + rng.below(3); k < m; ++k) {
            ref.uuids.push_back({rng.below(5000), rng.below(4)});
        }
        law.evidence.push_back(ref);
    }
    law.self_novelty = random_self_novelty(rng);
    return law;
}

inline Theory random_theory(Rng& rng, std::uint64_t index = 0) {
    Theory t;
    t.id = "theory-" + std::to_string(1 + index);
    t.name = random_sentence(rng, 4);
    t.description = random_sentence(rng, 12);
    for (std::uint64_t i = 0, n = 1 + rng.below(2); i < n; ++i) t.laws.push_back(random_law(rng));
    t.condition.knowledge = rng.below(2) ? KnowledgeSource::literature : KnowledgeSource::parametric;
    t.condition.objective = rng.below(2) ? Objective::novelty : Objective::accuracy;
    t.provenance = {"query-" + std::to_string(rng.below(10)), "digest", rng.next()};
    return t;
}

inline PaperRecord random_paper(Rng& rng, std::uint64_t index) {
    PaperRecord p;
    p.paper_id = "paper-" + std::to_string(index);
    p.title = random_sentence(rng, 5);
    p.authors = {random_word(rng), random_word(rng)};
    p.publication_date = Date{2023 + static_cast<int>(rng.below(3)),
                              1 + static_cast<int>(rng.below(12)),
                              1 + static_cast<int>(rng.below(28))};
    p.venue = random_word(rng);
    p.full_text = rng.below(4) ? random_sentence(rng, 20) : "";
    if (rng.below(2)) p.source_url = "https://example.org/" + std::to_string(index);
    return p;
}

}  // namespace theorygen::testing
