#include <doctest.h>

#include <set>

#include "test_support.hpp"
#include "theorygen/extraction/extraction.hpp"

using namespace theorygen;
using theorygen::testing::MockGatewayBuilder;

namespace {

TheoryQuery class_framework_query() {
    TheoryQuery q;
    q.id = "query-class";
    q.text = "Build a theory of how the CLASS framework's scaffolding and conversational "
             "strategies affect learning outcomes in LLM-powered intelligent tutoring systems.";
    q.kind = QueryKind::specific;
    return q;
}

PaperRecord its_fixture_paper() {
    PaperRecord p;
    p.paper_id = "fixture-its-paper";
    p.title = "Evaluating a Conversational Assistant in Introductory Programming";
    p.publication_date = Date{2024, 4, 1};
    p.venue = "CSEd";
    p.full_text = "Semester-long field study of a conversational course assistant.\n"
                  "EVIDENCE: CodeTutor | use\n";
    return p;
}

}  // namespace

TEST_CASE("schema generation fills the worked tutoring-system example") {
    auto gateway = MockGatewayBuilder{}.build();
    ExtractionSchema schema =
        generate_schema(*gateway, class_framework_query(), "extraction-schema-36");
    schema.validate();
    CHECK(schema.id == "extraction-schema-36");
    CHECK(schema.has_slot("its_name"));
    CHECK(schema.has_slot("uses_class_framework"));
    CHECK(schema.has_slot("outcomes_measured"));
    CHECK(schema.slots.size() >= 3);
    CHECK_FALSE(schema.generator_model_id.empty());

    // same query, same seed: identical schema
    auto gateway2 = MockGatewayBuilder{}.build();
    ExtractionSchema again =
        generate_schema(*gateway2, class_framework_query(), "extraction-schema-36");
    CHECK(canonical_dump(again.to_json()) == canonical_dump(schema.to_json()));
}

TEST_CASE("schemas with duplicate or malformed slot names are rejected") {
    MockScript script;
    script.add({prompt_assets::generate_schema, "", {{"query_text", "trigger-dup-slots"}},
                R"({"extraction_query": "q", "slots": [
                    {"name": "alpha", "description": "a"},
                    {"name": "alpha", "description": "again"},
                    {"name": "beta", "description": "b"}]})"});
    script.add({prompt_assets::generate_schema, "", {{"query_text", "trigger-bad-name"}},
                R"({"extraction_query": "q", "slots": [
                    {"name": "Alpha", "description": "a"},
                    {"name": "beta", "description": "b"},
                    {"name": "gamma", "description": "c"}]})"});
    script.add({prompt_assets::generate_schema, "", {{"query_text", "trigger-two-slots"}},
                R"({"extraction_query": "q", "slots": [
                    {"name": "alpha", "description": "a"},
                    {"name": "beta", "description": "b"}]})"});
    auto gateway = MockGatewayBuilder{.extra_script = script}.build();

    for (const char* trigger : {"trigger-dup-slots", "trigger-bad-name", "trigger-two-slots"}) {
        TheoryQuery q;
        q.id = "q";
        q.text = trigger;
        CHECK_THROWS_AS(generate_schema(*gateway, q, "extraction-schema-1"), ValidationError);
    }
}

TEST_CASE("worked example: the fixture tutoring paper extracts as e2696.0") {
    auto gateway = MockGatewayBuilder{}.build();
    ExtractionSchema schema =
        generate_schema(*gateway, class_framework_query(), "extraction-schema-36");
    RecordNumberAllocator allocator(2696);
    auto records = extract_evidence(*gateway, its_fixture_paper(), schema, allocator);
    REQUIRE(records.size() == 1);
    const ExtractionRecord& rec = records[0];
    CHECK(rec.uuid.to_string() == "e2696.0");
    CHECK(rec.id == "extraction-result-2696");
    CHECK(rec.header.mention_or_use == "use");
    CHECK(rec.header.name_short == "CodeTutor");
    CHECK(rec.relevant);
    CHECK(rec.slot_values.count("its_name"));
    rec.validate(schema);
    CHECK(canonical_dump(ExtractionRecord::from_json(rec.to_json()).to_json()) ==
          canonical_dump(rec.to_json()));
}

TEST_CASE("mentions within one paper share the record number and step the k-index") {
    auto gateway = MockGatewayBuilder{}.build();
    MockIndex index = MockIndex::load(theorygen::testing::fixture_path("papers.json"));
    PaperRecord three_systems = *index.lookup("p002");
    three_systems.full_text = *index.full_text("p002");

    TheoryQuery q;
    q.id = "query-generic";
    q.text = "Build a theory of dialogue strategies and engagement in tutoring.";
    ExtractionSchema schema = generate_schema(*gateway, q, "extraction-schema-1");
    RecordNumberAllocator allocator(2760);
    auto records = extract_evidence(*gateway, three_systems, schema, allocator);
    REQUIRE(records.size() == 3);
    CHECK(records[0].uuid.to_string() == "e2760.0");
    CHECK(records[1].uuid.to_string() == "e2760.1");
    CHECK(records[2].uuid.to_string() == "e2760.2");
    CHECK(records[1].header.mention_or_use == "mention");  // PeerPal is only mentioned
    for (const auto& rec : records) rec.validate(schema);
}

TEST_CASE("irrelevant papers and missing texts extract to nothing") {
    auto gateway = MockGatewayBuilder{}.build();
    MockIndex index = MockIndex::load(theorygen::testing::fixture_path("papers.json"));
    TheoryQuery q;
    q.id = "q";
    q.text = "Build a theory of tutoring scaffolds.";
    ExtractionSchema schema = generate_schema(*gateway, q, "extraction-schema-1");
    RecordNumberAllocator allocator(1);

    PaperRecord survey = *index.lookup("p005");
    survey.full_text = *index.full_text("p005");  // no evidence markers
    CHECK(extract_evidence(*gateway, survey, schema, allocator).empty());

    PaperRecord no_text = *index.lookup("p007");  // no open-access full text
    CHECK(extract_evidence(*gateway, no_text, schema, allocator).empty());
}

TEST_CASE("uuids stay unique across a run and reruns are identical") {
    auto build = [] { return MockGatewayBuilder{}.build(); };
    MockIndex index = MockIndex::load(theorygen::testing::fixture_path("papers.json"));
    TheoryQuery q;
    q.id = "q";
    q.text = "Build a theory of conversational tutoring outcomes.";

    auto run_once = [&](Gateway& gateway) {
        ExtractionSchema schema = generate_schema(gateway, q, "extraction-schema-1");
        RecordNumberAllocator allocator(1);
        std::vector<ExtractionRecord> all;
        for (const char* pid : {"p001", "p002", "p003", "p006"}) {
            PaperRecord paper = *index.lookup(pid);
            paper.full_text = index.full_text(pid).value_or("");
            for (auto& rec : extract_evidence(gateway, paper, schema, allocator)) {
                all.push_back(std::move(rec));
            }
        }
        return all;
    };

    auto g1 = build();
    auto g2 = build();
    auto first = run_once(*g1);
    auto second = run_once(*g2);

    std::set<EvidenceUuid> uuids;
    for (const auto& rec : first) CHECK(uuids.insert(rec.uuid).second);

    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(canonical_dump(first[i].to_json()) == canonical_dump(second[i].to_json()));
    }
}

TEST_CASE("long papers are chunked and merged under one record number") {
    auto gateway = MockGatewayBuilder{}.build();
    TheoryQuery q;
    q.id = "q";
    q.text = "Build a theory of scaffold chunking.";
    ExtractionSchema schema = generate_schema(*gateway, q, "extraction-schema-1");

    PaperRecord paper;
    paper.paper_id = "long-paper";
    paper.title = "A Very Long Report";
    paper.publication_date = Date{2024, 1, 1};
    std::string filler(400, 'x');
    paper.full_text = "EVIDENCE: SystemOne | use\n\n" + filler + "\n\n" +
                      "EVIDENCE: SystemTwo | use\n\n" + filler + "\n\n" +
                      "EVIDENCE: SystemThree | mention\n";

    ExtractionOptions options;
    options.chunk_chars = 450;  // forces several chunks
    RecordNumberAllocator allocator(10);
    auto records = extract_evidence(*gateway, paper, schema, allocator, options);
    REQUIRE(records.size() == 3);
    std::set<std::string> names;
    for (const auto& rec : records) {
        CHECK(rec.uuid.record == 10);  // one record number for the whole paper
        names.insert(rec.header.name_short);
    }
    CHECK(names == std::set<std::string>{"SystemOne", "SystemTwo", "SystemThree"});
}

TEST_CASE("responses with slots outside the schema are rejected") {
    MockScript script;
    script.add({prompt_assets::extract_evidence, "", {{"paper_id", "bogus-slot-paper"}},
                R"({"records": [{
                    "header": {"source_info": "s", "name_short": "X", "name_full": "X",
                               "brief_description": "d", "citation_title": "t",
                               "mention_or_use": "use"},
                    "slot_values": {"not_in_schema": "value"},
                    "relevant": true}]})"});
    auto gateway = MockGatewayBuilder{.extra_script = script}.build();
    TheoryQuery q;
    q.id = "q";
    q.text = "Build a theory of slots.";
    ExtractionSchema schema = generate_schema(*gateway, q, "extraction-schema-1");
    PaperRecord paper;
    paper.paper_id = "bogus-slot-paper";
    paper.title = "Bogus";
    paper.publication_date = Date{2024, 1, 1};
    paper.full_text = "EVIDENCE: X | use\n";
    RecordNumberAllocator allocator(1);
    CHECK_THROWS_AS(extract_evidence(*gateway, paper, schema, allocator), ValidationError);
}
