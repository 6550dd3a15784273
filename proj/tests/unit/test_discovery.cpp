#include <doctest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"
#include "theorygen/core/text.hpp"
#include "theorygen/discovery/discovery.hpp"

using namespace theorygen;
using theorygen::testing::MockGatewayBuilder;

namespace {

TheoryQuery tutoring_query() {
    TheoryQuery q;
    q.id = "query-its";
    q.text = "Build a theory of how conversational scaffolding in language-model tutoring "
             "systems influences student engagement and learning outcomes across subject "
             "domains.";
    q.kind = QueryKind::general;
    return q;
}

}  // namespace

TEST_CASE("query reformulation is scripted, deterministic, and non-empty") {
    MockScript script;
    script.add({prompt_assets::reformulate_query, "",
                {{"query_text", "trigger-fixed-reformulation"}},
                "scaffolded tutoring engagement outcomes"});
    script.add({prompt_assets::reformulate_query, "",
                {{"query_text", "trigger-empty-reformulation"}},
                ""});
    auto gateway = MockGatewayBuilder{.extra_script = script}.build();

    TheoryQuery q = tutoring_query();
    q.text = "trigger-fixed-reformulation";
    CHECK(reformulate_query(*gateway, q) == "scaffolded tutoring engagement outcomes");
    CHECK(reformulate_query(*gateway, q) == reformulate_query(*gateway, q));  // idempotent

    TheoryQuery empty = tutoring_query();
    empty.text = "trigger-empty-reformulation";
    CHECK_THROWS_AS(reformulate_query(*gateway, empty), StageError);
}

TEST_CASE("discover_corpus fills to K with direct hits before backfill") {
    auto gateway = MockGatewayBuilder{}.build();
    TheoryQuery q = tutoring_query();
    RetrievalPlan plan;
    plan.search_query = reformulate_query(*gateway, q);
    plan.target_size = 100;
    plan.date_filter = DateRange{std::nullopt, Date{2025, 6, 30}};

    Corpus corpus = discover_corpus(*gateway, plan, q.id);
    corpus.validate();

    // the fixture index resolves to the 12-paper generation corpus
    CHECK(corpus.papers.size() == 12);
    std::set<std::string> ids;
    for (const auto& p : corpus.papers) ids.insert(p.paper_id);
    CHECK(ids.size() == corpus.papers.size());

    // no paper dated after the supplement end enters a generation corpus
    for (const auto& p : corpus.papers) CHECK_FALSE(Date{2025, 6, 30} < p.publication_date);
    CHECK_FALSE(ids.count("p013"));

    // direct-search hits precede backfilled papers
    REQUIRE(corpus.retrieval_notes.size() == corpus.papers.size());
    bool seen_backfill = false;
    long backfilled = 0;
    for (const auto& note : corpus.retrieval_notes) {
        if (note.source == RetrievalSource::backfill) {
            seen_backfill = true;
            ++backfilled;
        } else {
            CHECK_FALSE(seen_backfill);
        }
    }
    CHECK(backfilled == 3);  // p010, p011, p012 arrive only via references
    for (const char* pid : {"p010", "p011", "p012"}) CHECK(ids.count(pid));

    // every backfilled paper is reachable from some direct paper's references
    std::set<std::string> referenced;
    for (const auto& p : corpus.papers) {
        for (const auto& r : scan_reference_markers(p.full_text)) referenced.insert(r);
    }
    for (const auto& note : corpus.retrieval_notes) {
        if (note.source == RetrievalSource::backfill) CHECK(referenced.count(note.paper_id));
    }
}

TEST_CASE("discover_corpus truncates at K when the index over-delivers") {
    auto gateway = MockGatewayBuilder{}.build();
    RetrievalPlan plan;
    plan.search_query = "conversational scaffolding tutoring engagement";
    plan.target_size = 5;
    plan.date_filter = DateRange{std::nullopt, Date{2025, 6, 30}};
    Corpus corpus = discover_corpus(*gateway, plan, "query-k5");
    CHECK(corpus.papers.size() == 5);
    for (const auto& note : corpus.retrieval_notes) {
        CHECK(note.source == RetrievalSource::direct_search);
    }
}

TEST_CASE("an index with no matches yields an empty corpus with a warning") {
    auto gateway = MockGatewayBuilder{}.build();
    RetrievalPlan plan;
    plan.search_query = "zzqx vvnn qqrr";  // overlaps nothing in the fixtures
    plan.target_size = 10;
    Corpus corpus = discover_corpus(*gateway, plan, "query-empty");
    CHECK(corpus.papers.empty());
    CHECK(corpus.empty_warning);
}

TEST_CASE("backfill ranking matches an independent sort oracle") {
    Rng rng(17);
    std::vector<ScoredCandidate> candidates;
    for (int i = 0; i < 20; ++i) {
        ScoredCandidate c;
        c.paper = theorygen::testing::random_paper(rng, i);
        if (rng.below(2)) {
            c.score = static_cast<double>(rng.below(4)) / 4.0;
            c.provider_scored = true;
        }
        candidates.push_back(c);
    }
    std::string query = "signal transfer scaffold";

    auto ranked = rank_backfill_candidates(candidates, query);

    // oracle: compute (score, date, id) triples independently and sort
    struct Key {
        double score;
        Date date;
        std::string id;
    };
    std::vector<Key> keys;
    for (const auto& c : candidates) {
        double score = c.provider_scored
                           ? c.score
                           : lexical_overlap(query, c.paper.title + " " + c.paper.venue);
        keys.push_back({score, c.paper.publication_date, c.paper.paper_id});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.date != b.date) return b.date < a.date;
        return a.id < b.id;
    });
    REQUIRE(ranked.size() == keys.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked[i].paper.paper_id == keys[i].id);
    }

    CHECK(rank_backfill_candidates({}, query).empty());

    // two candidates, one scored higher, higher first
    std::vector<ScoredCandidate> two(2);
    two[0].paper = theorygen::testing::random_paper(rng, 100);
    two[0].score = 0.2;
    two[0].provider_scored = true;
    two[1].paper = theorygen::testing::random_paper(rng, 101);
    two[1].score = 0.9;
    two[1].provider_scored = true;
    auto ordered = rank_backfill_candidates(two, query);
    CHECK(ordered[0].score == 0.9);
}
