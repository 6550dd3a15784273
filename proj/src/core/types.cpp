#include "theorygen/core/types.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace theorygen {

namespace {

[[noreturn]] void bad_enum(const char* what, const std::string& value) {
    throw ValidationError(std::string("unknown ") + what + ": '" + value + "'");
}

json strings_to_json(const std::vector<std::string>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(s);
    return a;
}

std::vector<std::string> strings_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw ValidationError(std::string(field) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw ValidationError(std::string(field) + " must contain strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// enums

std::string_view to_string(QueryKind v) {
    return v == QueryKind::general ? "general" : "specific";
}

QueryKind parse_query_kind(const std::string& s) {
    if (s == "general") return QueryKind::general;
    if (s == "specific") return QueryKind::specific;
    bad_enum("query kind", s);
}

std::string_view to_string(LawType v) {
    return v == LawType::qualitative ? "qualitative" : "quantitative";
}

LawType parse_law_type(const std::string& s) {
    if (s == "qualitative") return LawType::qualitative;
    if (s == "quantitative") return LawType::quantitative;
    bad_enum("law type", s);
}

std::string_view to_string(SelfNoveltyLabel v) {
    switch (v) {
        case SelfNoveltyLabel::novel: return "new";
        case SelfNoveltyLabel::somewhat_related: return "somewhat-related-to-existing";
        case SelfNoveltyLabel::closely_related: return "closely-related-to-existing";
        case SelfNoveltyLabel::existing: return "existing";
    }
    return "new";
}

SelfNoveltyLabel parse_self_novelty_label(const std::string& s) {
    if (s == "new") return SelfNoveltyLabel::novel;
    if (s == "somewhat-related-to-existing") return SelfNoveltyLabel::somewhat_related;
    if (s == "closely-related-to-existing") return SelfNoveltyLabel::closely_related;
    if (s == "existing") return SelfNoveltyLabel::existing;
    bad_enum("self-novelty label", s);
}

std::string_view to_string(KnowledgeSource v) {
    return v == KnowledgeSource::parametric ? "parametric" : "literature";
}

KnowledgeSource parse_knowledge_source(const std::string& s) {
    if (s == "parametric") return KnowledgeSource::parametric;
    if (s == "literature") return KnowledgeSource::literature;
    bad_enum("knowledge source", s);
}

std::string_view to_string(Objective v) {
    return v == Objective::accuracy ? "accuracy" : "novelty";
}

Objective parse_objective(const std::string& s) {
    if (s == "accuracy") return Objective::accuracy;
    if (s == "novelty") return Objective::novelty;
    bad_enum("objective", s);
}

std::string_view to_string(RetrievalSource v) {
    return v == RetrievalSource::direct_search ? "direct-search" : "backfill";
}

RetrievalSource parse_retrieval_source(const std::string& s) {
    if (s == "direct-search") return RetrievalSource::direct_search;
    if (s == "backfill") return RetrievalSource::backfill;
    bad_enum("retrieval source", s);
}

// ---------------------------------------------------------------------------
// EvidenceUuid

std::string EvidenceUuid::to_string() const {
    return "e" + std::to_string(record) + "." + std::to_string(mention);
}

bool EvidenceUuid::is_valid(const std::string& s) {
    // "e" + digits + "." + digits, nothing else
    if (s.size() < 4 || s[0] != 'e') return false;
    std::size_t dot = s.find('.');
    if (dot == std::string::npos || dot < 2 || dot + 1 >= s.size()) return false;
    auto all_digits = [](std::string_view part) {
        return !part.empty() && std::all_of(part.begin(), part.end(), [](unsigned char c) {
            return std::isdigit(c);
        });
    };
    return all_digits(std::string_view(s).substr(1, dot - 1)) &&
           all_digits(std::string_view(s).substr(dot + 1));
}

EvidenceUuid EvidenceUuid::parse(const std::string& s) {
    if (!is_valid(s)) throw ValidationError("invalid evidence uuid: '" + s + "'");
    std::size_t dot = s.find('.');
    EvidenceUuid u;
    u.record = std::stoull(s.substr(1, dot - 1));
    u.mention = std::stoull(s.substr(dot + 1));
    return u;
}

// ---------------------------------------------------------------------------
// TheoryQuery

void TheoryQuery::validate() const {
    if (text.empty()) throw ValidationError("theory query text must be non-empty");
    if (id.empty()) throw ValidationError("theory query id must be non-empty");
}

json TheoryQuery::to_json() const {
    json j = extra;
    j["id"] = id;
    j["text"] = text;
    j["kind"] = std::string(to_string(kind));
    if (source_paper_id) j["source_paper_id"] = *source_paper_id;
    return j;
}

TheoryQuery TheoryQuery::from_json(const json& j) {
    JsonReader r(j, "TheoryQuery");
    TheoryQuery q;
    q.id = r.require_string("id");
    q.text = r.require_string("text");
    q.kind = parse_query_kind(r.require_string("kind"));
    if (const json* v = r.find("source_paper_id")) q.source_paper_id = v->get<std::string>();
    q.extra = r.take_extra();
    q.validate();
    return q;
}

// ---------------------------------------------------------------------------
// PaperRecord

void PaperRecord::validate() const {
    if (paper_id.empty()) throw ValidationError("paper_id must be non-empty");
}

json PaperRecord::to_json() const {
    json j = extra;
    j["paper_id"] = paper_id;
    j["title"] = title;
    j["authors"] = strings_to_json(authors);
    j["publication_date"] = publication_date.to_string();
    j["venue"] = venue;
    j["full_text"] = full_text;
    if (source_url) j["source_url"] = *source_url;
    return j;
}

PaperRecord PaperRecord::from_json(const json& j) {
    JsonReader r(j, "PaperRecord");
    PaperRecord p;
    p.paper_id = r.require_string("paper_id");
    p.title = r.string_or("title", "");
    if (const json* v = r.find("authors")) p.authors = strings_from_json(*v, "authors");
    p.publication_date = Date::parse(r.require_string("publication_date"));
    p.venue = r.string_or("venue", "");
    p.full_text = r.string_or("full_text", "");
    if (const json* v = r.find("source_url")) p.source_url = v->get<std::string>();
    p.extra = r.take_extra();
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Corpus

json ProvenanceNote::to_json() const {
    json j;
    j["paper_id"] = paper_id;
    j["source"] = std::string(to_string(source));
    j["relevance"] = relevance;
    j["detail"] = detail;
    return j;
}

ProvenanceNote ProvenanceNote::from_json(const json& j) {
    JsonReader r(j, "ProvenanceNote");
    ProvenanceNote n;
    n.paper_id = r.require_string("paper_id");
    n.source = parse_retrieval_source(r.require_string("source"));
    n.relevance = r.require("relevance").get<double>();
    n.detail = r.string_or("detail", "");
    return n;
}

void Corpus::validate() const {
    if (target_size < 0 || static_cast<int>(papers.size()) > target_size) {
        throw ValidationError("corpus holds more papers than its target size");
    }
    std::set<std::string> ids;
    for (const auto& p : papers) {
        if (!ids.insert(p.paper_id).second) {
            throw ValidationError("duplicate paper_id in corpus: " + p.paper_id);
        }
    }
}

json Corpus::to_json() const {
    json j = extra;
    j["query_id"] = query_id;
    json papers_j = json::array();
    for (const auto& p : papers) papers_j.push_back(p.to_json());
    j["papers"] = papers_j;
    j["target_size"] = target_size;
    json notes = json::array();
    for (const auto& n : retrieval_notes) notes.push_back(n.to_json());
    j["retrieval_notes"] = notes;
    j["empty_warning"] = empty_warning;
    return j;
}

Corpus Corpus::from_json(const json& j) {
    JsonReader r(j, "Corpus");
    Corpus c;
    c.query_id = r.require_string("query_id");
    for (const auto& e : r.require("papers")) c.papers.push_back(PaperRecord::from_json(e));
    c.target_size = r.require("target_size").get<int>();
    if (const json* v = r.find("retrieval_notes")) {
        for (const auto& e : *v) c.retrieval_notes.push_back(ProvenanceNote::from_json(e));
    }
    if (const json* v = r.find("empty_warning")) c.empty_warning = v->get<bool>();
    c.extra = r.take_extra();
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// KnowledgeWindow

void KnowledgeWindow::validate() const {
    if (!(model_cutoff < supplement_end && supplement_end < holdout_end)) {
        throw ValidationError("knowledge window must satisfy cutoff < supplement_end < holdout_end");
    }
}

json KnowledgeWindow::to_json() const {
    json j;
    j["model_cutoff"] = model_cutoff.to_string();
    j["supplement_end"] = supplement_end.to_string();
    j["holdout_end"] = holdout_end.to_string();
    return j;
}

KnowledgeWindow KnowledgeWindow::from_json(const json& j) {
    JsonReader r(j, "KnowledgeWindow");
    KnowledgeWindow w;
    w.model_cutoff = Date::parse(r.require_string("model_cutoff"));
    w.supplement_end = Date::parse(r.require_string("supplement_end"));
    w.holdout_end = Date::parse(r.require_string("holdout_end"));
    w.validate();
    return w;
}

DateRange KnowledgeWindow::holdout_range() const {
    // (supplement_end, holdout_end]: the first day after supplement_end opens
    // the holdout period.
    Date from = supplement_end;
    // advance one day
    Date next = from;
    next.day += 1;
    if (!Date::try_parse(next.to_string())) {
        next.day = 1;
        next.month += 1;
        if (next.month > 12) {
            next.month = 1;
            next.year += 1;
        }
    }
    return {next, holdout_end};
}

// ---------------------------------------------------------------------------
// Law / SelfNoveltyAssessment

json SelfNoveltyAssessment::to_json() const {
    json j = extra;
    j["what_exists"] = what_exists;
    j["what_is_novel"] = what_is_novel;
    j["classification_explanation"] = classification_explanation;
    j["classification"] = std::string(to_string(classification));
    j["llm_generated_refs"] = strings_to_json(llm_generated_refs);
    return j;
}

SelfNoveltyAssessment SelfNoveltyAssessment::from_json(const json& j) {
    JsonReader r(j, "SelfNoveltyAssessment");
    SelfNoveltyAssessment a;
    a.what_exists = r.string_or("what_exists", "");
    a.what_is_novel = r.string_or("what_is_novel", "");
    a.classification_explanation = r.string_or("classification_explanation", "");
    a.classification = parse_self_novelty_label(r.require_string("classification"));
    if (const json* v = r.find("llm_generated_refs")) {
        a.llm_generated_refs = strings_from_json(*v, "llm_generated_refs");
    }
    a.extra = r.take_extra();
    return a;
}

json EvidenceRef::to_json() const {
    json j;
    j["description"] = description;
    json ids = json::array();
    for (const auto& u : uuids) ids.push_back(u.to_string());
    j["uuids"] = ids;
    return j;
}

EvidenceRef EvidenceRef::from_json(const json& j) {
    JsonReader r(j, "EvidenceRef");
    EvidenceRef e;
    e.description = r.string_or("description", "");
    for (const auto& u : r.require("uuids")) {
        e.uuids.push_back(EvidenceUuid::parse(u.get<std::string>()));
    }
    return e;
}

void Law::validate() const {
    if (statement.empty()) throw ValidationError("law statement must be non-empty");
    // evidence uuids re-validate on parse; nothing further here
}

json Law::to_json() const {
    json j = extra;
    j["name"] = name;
    j["statement"] = statement;
    j["law_type"] = std::string(to_string(law_type));
    j["scope"] = scope;
    j["special_cases"] = strings_to_json(special_cases);
    json ev = json::array();
    for (const auto& e : evidence) ev.push_back(e.to_json());
    j["evidence"] = ev;
    j["self_novelty"] = self_novelty.to_json();
    return j;
}

Law Law::from_json(const json& j) {
    JsonReader r(j, "Law");
    Law l;
    l.name = r.string_or("name", "");
    l.statement = r.require_string("statement");
    l.law_type = parse_law_type(r.require_string("law_type"));
    l.scope = r.string_or("scope", "");
    if (const json* v = r.find("special_cases")) {
        l.special_cases = strings_from_json(*v, "special_cases");
    }
    if (const json* v = r.find("evidence")) {
        for (const auto& e : *v) l.evidence.push_back(EvidenceRef::from_json(e));
    }
    l.self_novelty = SelfNoveltyAssessment::from_json(r.require("self_novelty"));
    l.extra = r.take_extra();
    l.validate();
    return l;
}

std::vector<EvidenceUuid> Law::all_uuids() const {
    std::vector<EvidenceUuid> out;
    for (const auto& e : evidence) {
        out.insert(out.end(), e.uuids.begin(), e.uuids.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// GenerationCondition / Theory

std::string GenerationCondition::label() const {
    return std::string(to_string(knowledge)) + "-" + std::string(to_string(objective));
}

GenerationCondition GenerationCondition::parse_label(const std::string& s) {
    std::size_t dash = s.find('-');
    if (dash == std::string::npos) bad_enum("condition label", s);
    GenerationCondition c;
    c.knowledge = parse_knowledge_source(s.substr(0, dash));
    c.objective = parse_objective(s.substr(dash + 1));
    return c;
}

json GenerationCondition::to_json() const {
    json j;
    j["knowledge"] = std::string(to_string(knowledge));
    j["objective"] = std::string(to_string(objective));
    return j;
}

GenerationCondition GenerationCondition::from_json(const json& j) {
    JsonReader r(j, "GenerationCondition");
    GenerationCondition c;
    c.knowledge = parse_knowledge_source(r.require_string("knowledge"));
    c.objective = parse_objective(r.require_string("objective"));
    return c;
}

std::vector<GenerationCondition> all_conditions() {
    return {
        {KnowledgeSource::parametric, Objective::accuracy},
        {KnowledgeSource::literature, Objective::accuracy},
        {KnowledgeSource::parametric, Objective::novelty},
        {KnowledgeSource::literature, Objective::novelty},
    };
}

json TheoryProvenance::to_json() const {
    json j;
    j["query_id"] = query_id;
    j["evidence_digest"] = evidence_digest;
    j["generation_seed"] = generation_seed;
    return j;
}

TheoryProvenance TheoryProvenance::from_json(const json& j) {
    JsonReader r(j, "TheoryProvenance");
    TheoryProvenance p;
    p.query_id = r.require_string("query_id");
    p.evidence_digest = r.string_or("evidence_digest", "");
    p.generation_seed = r.require("generation_seed").get<std::uint64_t>();
    return p;
}

void Theory::validate() const {
    if (id.empty()) throw ValidationError("theory id must be non-empty");
    if (laws.empty()) throw ValidationError("theory must contain at least one law");
    for (const auto& l : laws) l.validate();
}

json Theory::to_json() const {
    json j = extra;
    j["id"] = id;
    j["name"] = name;
    j["description"] = description;
    json laws_j = json::array();
    for (const auto& l : laws) laws_j.push_back(l.to_json());
    j["laws"] = laws_j;
    j["condition"] = condition.to_json();
    j["provenance"] = provenance.to_json();
    return j;
}

Theory Theory::from_json(const json& j) {
    JsonReader r(j, "Theory");
    Theory t;
    t.id = r.require_string("id");
    t.name = r.string_or("name", "");
    t.description = r.string_or("description", "");
    for (const auto& e : r.require("laws")) t.laws.push_back(Law::from_json(e));
    t.condition = GenerationCondition::from_json(r.require("condition"));
    t.provenance = TheoryProvenance::from_json(r.require("provenance"));
    t.extra = r.take_extra();
    t.validate();
    return t;
}

std::string make_law_id(const std::string& theory_id, std::size_t law_index) {
    return theory_id + ".law-" + std::to_string(law_index);
}

// ---------------------------------------------------------------------------
// RunManifest

json RunManifest::to_json() const {
    json j = extra;
    j["run_id"] = run_id;
    j["random_seed"] = random_seed;
    json m = json::object();
    for (const auto& [stage, model] : models) m[stage] = model;
    j["models"] = m;
    j["knowledge_window"] = knowledge_window.to_json();
    j["config_digest"] = config_digest;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    JsonReader r(j, "RunManifest");
    RunManifest m;
    m.run_id = r.require_string("run_id");
    m.random_seed = r.require("random_seed").get<std::uint64_t>();
    if (const json* v = r.find("models")) {
        for (auto it = v->begin(); it != v->end(); ++it) {
            m.models[it.key()] = it.value().get<std::string>();
        }
    }
    m.knowledge_window = KnowledgeWindow::from_json(r.require("knowledge_window"));
    m.config_digest = r.string_or("config_digest", "");
    m.extra = r.take_extra();
    return m;
}

}  // namespace theorygen
