#include <doctest.h>

#include <numeric>

#include "test_support.hpp"
#include "theorygen/core/text.hpp"
#include "theorygen/core/validate.hpp"
#include "theorygen/synthesis/synthesis.hpp"

using namespace theorygen;
using theorygen::testing::MockGatewayBuilder;
using theorygen::testing::random_theory;

namespace {

ExtractionRecord record_with_uuid(std::uint64_t n, std::uint64_t k) {
    ExtractionRecord rec;
    rec.id = "extraction-result-" + std::to_string(n);
    rec.uuid = {n, k};
    rec.header = {"src", "Sys" + std::to_string(n), "System " + std::to_string(n), "desc",
                  "title", "use"};
    rec.slot_values["system_name"] = "Sys" + std::to_string(n);
    rec.relevant = true;
    return rec;
}

std::vector<ExtractionRecord> n_records(std::size_t count) {
    std::vector<ExtractionRecord> records;
    for (std::size_t i = 0; i < count; ++i) {
        records.push_back(record_with_uuid(i + 1, 0));
    }
    return records;
}

TheoryQuery some_query() {
    TheoryQuery q;
    q.id = "query-1";
    q.text = "Build a theory of conversational scaffolding and engagement.";
    return q;
}

}  // namespace

TEST_CASE("bundles keep everything when the budget allows") {
    auto records = n_records(10);
    EvidenceBundle bundle = assemble_evidence(records, 1'000'000, 42);
    CHECK(bundle.records.size() == 10);
    CHECK_FALSE(bundle.subsample_seed.has_value());
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(bundle.records[i].uuid == records[i].uuid);  // stable order
    }
    // deterministic digest
    CHECK(assemble_evidence(records, 1'000'000, 42).digest == bundle.digest);
    CHECK(assemble_evidence(records, 1'000'000, 7).digest == bundle.digest);  // no subsampling
}

TEST_CASE("over-budget bundles match an independent replay of the seeded sampler") {
    auto records = n_records(100);
    std::vector<long> costs;
    long total = 0;
    for (const auto& r : records) {
        costs.push_back(estimate_tokens(canonical_dump(r.to_json())));
        total += costs.back();
    }
    long budget = total / 2;  // forces roughly half out
    std::uint64_t seed = ４２;
    EvidenceBundle bundle = assemble_evidence(records, budget, seed);
    CHECK(bundle.subsample_seed == seed);
    CHECK(bundle.token_estimate <= budget);
    CHECK(bundle.records.size() < records.size());

    // reference sampler, re-implemented from the documented algorithm:
    // shuffle indices with Rng(derive_seed(seed, "evidence-subsample")),
    // greedily keep whatever still fits, restore original order
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "evidence-subsample"));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    long remaining = budget;
    std::vector<std::size_t> keep;
    for (std::size_t idx : order) {
        if (costs[idx] <= remaining) {
            keep.push_back(idx);
            remaining -= costs[idx];
        }
    }
    std::sort(keep.begin(), keep.end());
    REQUIRE(bundle.records.size() == keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        CHECK(bundle.records[i].uuid == records[keep[i]].uuid);
    }

    // same inputs, same seed: identical digest
    CHECK(assemble_evidence(records, budget, seed).digest == bundle.digest);
}

TEST_CASE("records flagged irrelevant never reach a bundle") {
    auto records = n_records(6);
    records[2].relevant = false;
    records[5].relevant = false;
    EvidenceBundle bundle = assemble_evidence(records, 1'000'000, 1);
    CHECK(bundle.records.size() == 4);
    for (const auto& r : bundle.records) CHECK(r.relevant);
}

TEST_CASE("empty record sets make an empty bundle for the parametric condition") {
    EvidenceBundle bundle = assemble_evidence({}, 1000, 1);
    CHECK(bundle.records.empty());
    CHECK(bundle.token_estimate == 0);
    CHECK_THROWS_AS(assemble_evidence({}, 0, 1), ValidationError);
}

TEST_CASE("synthesis enforces the bundle/condition pairing") {
    auto gateway = MockGatewayBuilder{}.build();
    TheoryIdAllocator ids;
    SynthesisOptions options;
    options.theories_per_query = 2;

    EvidenceBundle full = assemble_evidence(n_records(3), 1'000'000, 1);
    EvidenceBundle empty = assemble_evidence({}, 1000, 1);

    GenerationCondition lit{KnowledgeSource::literature, Objective::accuracy};
    GenerationCondition param{KnowledgeSource::parametric, Objective::accuracy};
    CHECK_THROWS_AS(synthesize_theories(*gateway, some_query(), empty, lit, options, ids),
                    ValidationError);
    CHECK_THROWS_AS(synthesize_theories(*gateway, some_query(), full, param, options, ids),
                    ValidationError);
}

TEST_CASE("synthesized theories carry condition, provenance, and resolvable evidence") {
    auto gateway = MockGatewayBuilder{}.build();
    TheoryIdAllocator ids;
    SynthesisOptions options;
    options.theories_per_query = 3;
    options.generation_seed = 7;

    EvidenceBundle bundle = assemble_evidence(n_records(8), 1'000'000, 7);
    GenerationCondition lit{KnowledgeSource::literature, Objective::accuracy};
    auto theories = synthesize_theories(*gateway, some_query(), bundle, lit, options, ids);
    CHECK(theories.size() == 3);
    std::vector<EvidenceUuid> available;
    for (const auto& r : bundle.records) available.push_back(r.uuid);
    for (const auto& t : theories) {
        t.validate();
        CHECK(t.condition == lit);
        CHECK(t.provenance.query_id == "query-1");
        CHECK(t.provenance.evidence_digest == bundle.digest);
        CHECK(t.provenance.generation_seed == 7);
        CHECK(t.laws.size() >= 1);
        CHECK(t.laws.size() <= 2);  // typically one or two laws
        CHECK(validate_evidence_links(t, available).empty());
        for (const auto& law : t.laws) {
            CHECK_FALSE(law.evidence.empty());  // literature condition cites evidence
        }
    }

    // parametric theories cite nothing
    EvidenceBundle empty = assemble_evidence({}, 1000, 1);
    GenerationCondition param{KnowledgeSource::parametric, Objective::accuracy};
    for (const auto& t :
         synthesize_theories(*gateway, some_query(), empty, param, options, ids)) {
        for (const auto& law : t.laws) CHECK(law.all_uuids().empty());
    }
}

TEST_CASE("worked example: the scripted multi-agent theory cites e2892.0") {
    auto gateway = MockGatewayBuilder{}.build();
    TheoryIdAllocator ids(215);
    SynthesisOptions options;
    options.theories_per_query = 1;

    std::vector<ExtractionRecord> records = {record_with_uuid(2892, 0)};
    EvidenceBundle bundle = assemble_evidence(records, 1'000'000, 1);

    TheoryQuery q;
    q.id = "query-mas";
    q.text = "multi-agent social presence in tutoring systems";  // matches the canned entry
    GenerationCondition lit{KnowledgeSource::literature, Objective::accuracy};
    auto theories = synthesize_theories(*gateway, q, bundle, lit, options, ids);
    REQUIRE(theories.size() == 1);
    CHECK(theories[0].id == "theory-215");
    CHECK(theories[0].name == "Emergent Multi-Agent Social Presence Theory in LLM-ITS");
    REQUIRE(theories[0].laws.size() == 1);
    CHECK(theories[0].laws[0].name == "Multi-Agent Social Presence Law");
    CHECK(theories[0].laws[0].all_uuids() == std::vector<EvidenceUuid>{{2892, 0}});
    CHECK(theories[0].laws[0].self_novelty.classification == SelfNoveltyLabel::novel);
}

TEST_CASE("reflection keeps the original on violations") {
    Rng rng(9);
    Theory theory = random_theory(rng);
    theory.laws.resize(1);
    theory.laws[0].evidence = {{"evidence", {EvidenceUuid{1, 0}}}};
    std::set<EvidenceUuid> bundle_uuids = {EvidenceUuid{1, 0}};

    SUBCASE("identity reflection returns the theory unchanged") {
        auto gateway = MockGatewayBuilder{}.build();
        Theory reflected = reflect(*gateway, theory, bundle_uuids);
        CHECK(canonical_dump(reflected.to_json()) == canonical_dump(theory.to_json()));
    }
    SUBCASE("a reflection citing an unavailable uuid is rejected") {
        MockScript script;
        json bad = theory.to_json();
        bad["laws"][0]["evidence"][0]["uuids"] = json::array({"e999.0"});
        script.add({prompt_assets::reflect_theory, "", {{"theory_json", theory.id}},
                    json{{"theory", bad}}.dump()});
        auto gateway = MockGatewayBuilder{.extra_script = script}.build();
        Theory reflected = reflect(*gateway, theory, bundle_uuids);
        CHECK(canonical_dump(reflected.to_json()) == canonical_dump(theory.to_json()));
    }
    SUBCASE("a reflection dropping every law is rejected") {
        MockScript script;
        json bad = theory.to_json();
        bad["laws"] = json::array();
        script.add({prompt_assets::reflect_theory, "", {{"theory_json", theory.id}},
                    json{{"theory", bad}}.dump()});
        auto gateway = MockGatewayBuilder{.extra_script = script}.build();
        Theory reflected = reflect(*gateway, theory, bundle_uuids);
        CHECK(reflected.laws.size() == 1);
    }
    SUBCASE("a reflected theory has zero dangling uuids by the validator oracle") {
        auto gateway = MockGatewayBuilder{}.build();
        Theory reflected = reflect(*gateway, theory, bundle_uuids);
        std::vector<EvidenceUuid> available(bundle_uuids.begin(), bundle_uuids.end());
        CHECK(validate_evidence_links(reflected, available).empty());
    }
}

TEST_CASE("self-novelty filtering removes only the two least-novel labels") {
    SUBCASE("spec rule cases") {
        Rng rng(3);
        Theory t = random_theory(rng);
        t.laws.resize(2);
        t.laws[0].self_novelty.classification = SelfNoveltyLabel::novel;
        t.laws[1].self_novelty.classification = SelfNoveltyLabel::existing;
        auto result = filter_laws_by_self_novelty({t});
        REQUIRE(result.kept.size() == 1);
        REQUIRE(result.filtered.size() == 1);
        CHECK(result.kept[0].law_index == 0);
        CHECK(result.filtered[0].law_index == 1);
        CHECK(result.filtered_fraction == 0.5);
    }
    SUBCASE("randomized law sets match the counting oracle") {
        Rng rng(8);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Theory> theories;
            long expect_filtered = 0, expect_total = 0;
            for (std::uint64_t i = 0, n = 1 + rng.below(6); i < n; ++i) {
                Theory t = random_theory(rng, i);
                for (auto& law : t.laws) {
                    ++expect_total;
                    auto label = law.self_novelty.classification;
                    if (label == SelfNoveltyLabel::closely_related ||
                        label == SelfNoveltyLabel::existing) {
                        ++expect_filtered;
                    }
                }
                theories.push_back(std::move(t));
            }
            auto result = filter_laws_by_self_novelty(theories);
            for (const auto& kept : result.kept) {
                auto label = kept.law.self_novelty.classification;
                CHECK(label != SelfNoveltyLabel::closely_related);
                CHECK(label != SelfNoveltyLabel::existing);
            }
            CHECK(static_cast<long>(result.filtered.size()) == expect_filtered);
            CHECK(result.filtered_fraction ==
                  (expect_total == 0
                       ? 0.0
                       : static_cast<double>(expect_filtered) / static_cast<double>(expect_total)));
        }
    }
}
