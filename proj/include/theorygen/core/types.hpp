#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "theorygen/core/date.hpp"
#include "theorygen/core/json_util.hpp"

// Domain records shared across the pipeline. All types are immutable by
// convention after construction/deserialization and safe to share across
// threads. Every record type provides:
//   to_json()    canonical JSON value (sorted keys when dumped)
//   from_json()  parse + invariant validation; unknown fields are kept in
//                `extra` and re-emitted verbatim on serialization
//   validate()   throws ValidationError when an invariant is broken

namespace theorygen {

// ---------------------------------------------------------------------------
// enums

enum class QueryKind { general, specific };
enum class LawType { qualitative, quantitative };
enum class SelfNoveltyLabel { novel, somewhat_related, closely_related, existing };
enum class KnowledgeSource { parametric, literature };
enum class Objective { accuracy, novelty };

std::string_view to_string(QueryKind v);
std::string_view to_string(LawType v);
std::string_view to_string(SelfNoveltyLabel v);
std::string_view to_string(KnowledgeSource v);
std::string_view to_string(Objective v);

QueryKind parse_query_kind(const std::string& s);
LawType parse_law_type(const std::string& s);
SelfNoveltyLabel parse_self_novelty_label(const std::string& s);
KnowledgeSource parse_knowledge_source(const std::string& s);
Objective parse_objective(const std::string& s);

// ---------------------------------------------------------------------------
// evidence UUIDs: "e<record>.<mention>"

struct EvidenceUuid {
    std::uint64_t record = 0;
    std::uint64_t mention = 0;

    auto operator<=>(const EvidenceUuid&) const = default;

    std::string to_string() const;
    static EvidenceUuid parse(const std::string& s);  // throws ValidationError
    static bool is_valid(const std::string& s);
};

// ---------------------------------------------------------------------------
// records

struct TheoryQuery {
    std::string id;
    std::string text;
    QueryKind kind = QueryKind::general;
    std::optional<std::string> source_paper_id;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static TheoryQuery from_json(const json& j);
};

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::vector<std::string> authors;
    Date publication_date;
    std::string venue;
    std::string full_text;  // possibly empty
    std::optional<std::string> source_url;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static PaperRecord from_json(const json& j);
};

enum class RetrievalSource { direct_search, backfill };
std::string_view to_string(RetrievalSource v);
RetrievalSource parse_retrieval_source(const std::string& s);

struct ProvenanceNote {
    std::string paper_id;
    RetrievalSource source = RetrievalSource::direct_search;
    double relevance = 0.0;
    std::string detail;

    json to_json() const;
    static ProvenanceNote from_json(const json& j);
};

struct Corpus {
    std::string query_id;
    std::vector<PaperRecord> papers;
    int target_size = 0;
    std::vector<ProvenanceNote> retrieval_notes;
    bool empty_warning = false;  // set when nothing was found anywhere
    json extra = json::object();

    void validate() const;  // |papers| <= target_size, no duplicate paper_id
    json to_json() const;
    static Corpus from_json(const json& j);
};

struct KnowledgeWindow {
    Date model_cutoff;
    Date supplement_end;
    Date holdout_end;

    void validate() const;  // model_cutoff < supplement_end < holdout_end
    json to_json() const;
    static KnowledgeWindow from_json(const json& j);

    /// Papers visible during generation: anything up to supplement_end.
    DateRange generation_range() const { return {std::nullopt, supplement_end}; }
    /// Held-out evaluation papers: (supplement_end, holdout_end].
    DateRange holdout_range() const;
};

struct SelfNoveltyAssessment {
    std::string what_exists;
    std::string what_is_novel;
    std::string classification_explanation;
    SelfNoveltyLabel classification = SelfNoveltyLabel::novel;
    std::vector<std::string> llm_generated_refs;
    json extra = json::object();

    json to_json() const;
    static SelfNoveltyAssessment from_json(const json& j);
};

struct EvidenceRef {
    std::string description;
    std::vector<EvidenceUuid> uuids;

    json to_json() const;
    static EvidenceRef from_json(const json& j);
};

struct Law {
    std::string name;
    std::string statement;
    LawType law_type = LawType::qualitative;
    std::string scope;
    std::vector<std::string> special_cases;
    std::vector<EvidenceRef> evidence;
    SelfNoveltyAssessment self_novelty;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static Law from_json(const json& j);

    std::vector<EvidenceUuid> all_uuids() const;
};

struct GenerationCondition {
    KnowledgeSource knowledge = KnowledgeSource::parametric;
    Objective objective = Objective::accuracy;

    auto operator<=>(const GenerationCondition&) const = default;

    /// "parametric-accuracy", "literature-novelty", ... used for directories
    /// and report axes.
    std::string label() const;
    static GenerationCondition parse_label(const std::string& s);

    json to_json() const;
    static GenerationCondition from_json(const json& j);
};

/// All four knowledge x objective combinations, in fixed report order.
std::vector<GenerationCondition> all_conditions();

struct TheoryProvenance {
    std::string query_id;
    std::string evidence_digest;
    std::uint64_t generation_seed = 0;

    json to_json() const;
    static TheoryProvenance from_json(const json& j);
};

struct Theory {
    std::string id;
    std::string name;
    std::string description;
    std::vector<Law> laws;  // non-empty
    GenerationCondition condition;
    TheoryProvenance provenance;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static Theory from_json(const json& j);
};

/// Stable identifier for law k of a theory ("theory-7.law-0").
std::string make_law_id(const std::string& theory_id, std::size_t law_index);

struct RunManifest {
    std::string run_id;
    std::uint64_t random_seed = 0;
    std::map<std::string, std::string> models;  // stage -> model_id
    KnowledgeWindow knowledge_window;
    std::string config_digest;
    json extra = json::object();

    json to_json() const;
    static RunManifest from_json(const json& j);
};

}  // namespace theorygen
