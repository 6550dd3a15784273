#include "theorygen/gateway/mock.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "theorygen/core/rng.hpp"
#include "theorygen/core/text.hpp"
#include "theorygen/gateway/prompts.hpp"

namespace theorygen {

// ---------------------------------------------------------------------------
// marker scanning

std::vector<EvidenceUuid> scan_evidence_uuids(const std::string& text) {
    std::vector<EvidenceUuid> out;
    std::set<EvidenceUuid> seen;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != 'e') continue;
        if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_' ||
                      text[i - 1] == '.')) {
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i + 1 || j >= text.size() || text[j] != '.') continue;
        std::size_t k = j + 1;
        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        if (k == j + 1) continue;
        if (k < text.size() && (std::isalnum(static_cast<unsigned char>(text[k])) ||
                                text[k] == '.' || text[k] == '_')) {
            continue;
        }
        EvidenceUuid u;
        u.record = std::stoull(text.substr(i + 1, j - i - 1));
        u.mention = std::stoull(text.substr(j + 1, k - j - 1));
        if (seen.insert(u).second) out.push_back(u);
        i = k - 1;
    }
    return out;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

std::vector<EvidenceMarker> scan_evidence_markers(const std::string& text) {
    std::vector<EvidenceMarker> out;
    for (const auto& line : split_lines(text)) {
        std::string t = trim(line);
        if (t.rfind("EVIDENCE:", 0) != 0) continue;
        std::string rest = t.substr(9);
        std::size_t bar = rest.find('|');
        EvidenceMarker m;
        if (bar == std::string::npos) {
            m.name = trim(rest);
            m.mention_or_use = "use";
        } else {
            m.name = trim(rest.substr(0, bar));
            m.mention_or_use = trim(rest.substr(bar + 1));
            if (m.mention_or_use != "mention" && m.mention_or_use != "use") {
                m.mention_or_use = "use";
            }
        }
        if (!m.name.empty()) out.push_back(m);
    }
    return out;
}

std::vector<std::string> scan_reference_markers(const std::string& text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& line : split_lines(text)) {
        std::string t = trim(line);
        if (t.rfind("REF:", 0) != 0) continue;
        std::string id = trim(t.substr(4));
        if (!id.empty() && seen.insert(id).second) out.push_back(id);
    }
    return out;
}

// ---------------------------------------------------------------------------
// MockIndex

MockIndex MockIndex::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open mock index file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(parse_json(buf.str()));
}

MockIndex MockIndex::from_json(const json& j) {
    MockIndex index;
    JsonReader r(j, "MockIndex");
    for (const auto& e : r.require("papers")) index.add(PaperRecord::from_json(e));
    return index;
}

void MockIndex::add(PaperRecord paper) {
    if (by_id_.count(paper.paper_id)) {
        throw ValidationError("duplicate paper_id in mock index: " + paper.paper_id);
    }
    by_id_[paper.paper_id] = papers_.size();
    papers_.push_back(std::move(paper));
}

std::vector<PaperRecord> MockIndex::search(const std::string& query, const DateRange& date_filter,
                                           int result_cap) const {
    struct Scored {
        double score;
        const PaperRecord* paper;
    };
    std::vector<Scored> scored;
    for (const auto& p : papers_) {
        if (!date_filter.contains(p.publication_date)) continue;
        double s = lexical_overlap(query, p.title + " " + p.full_text);
        if (s <= 0.0) continue;
        scored.push_back({s, &p});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.paper->publication_date != b.paper->publication_date) {
            return b.paper->publication_date < a.paper->publication_date;
        }
        return a.paper->paper_id < b.paper->paper_id;
    });
    if (result_cap >= 0 && static_cast<int>(scored.size()) > result_cap) {
        scored.resize(result_cap);
    }
    std::vector<PaperRecord> out;
    out.reserve(scored.size());
    for (const auto& s : scored) {
        PaperRecord stub = *s.paper;
        stub.full_text.clear();  // search returns metadata stubs
        stub.extra["relevance_score"] = s.score;
        out.push_back(std::move(stub));
    }
    return out;
}

std::optional<PaperRecord> MockIndex::lookup(const std::string& paper_id) const {
    auto it = by_id_.find(paper_id);
    if (it == by_id_.end()) return std::nullopt;
    PaperRecord stub = papers_[it->second];
    stub.full_text.clear();
    return stub;
}

std::optional<std::string> MockIndex::full_text(const std::string& paper_id) const {
    auto it = by_id_.find(paper_id);
    if (it == by_id_.end() || papers_[it->second].full_text.empty()) return std::nullopt;
    return papers_[it->second].full_text;
}

// ---------------------------------------------------------------------------
// MockScript

MockScript MockScript::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open mock script file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(parse_json(buf.str()));
}

MockScript MockScript::from_json(const json& j) {
    MockScript script;
    JsonReader r(j, "MockScript");
    for (const auto& e : r.require("entries")) {
        JsonReader er(e, "MockScript entry");
        Entry entry;
        entry.prompt_asset_id = er.require_string("prompt_asset_id");
        entry.request_digest = er.string_or("request_digest", "");
        if (const json* v = er.find("variables_contain")) {
            for (auto it = v->begin(); it != v->end(); ++it) {
                entry.variables_contain[it.key()] = it.value().get<std::string>();
            }
        }
        const json& resp = er.require("response");
        entry.response = resp.is_string() ? resp.get<std::string>() : resp.dump();
        script.add(std::move(entry));
    }
    return script;
}

void MockScript::add(Entry entry) { entries_.push_back(std::move(entry)); }

const std::string* MockScript::match(const ChatRequest& request) const {
    for (const auto& e : entries_) {
        if (e.prompt_asset_id != request.prompt_asset_id) continue;
        if (!e.request_digest.empty()) {
            if (e.request_digest == request.digest()) return &e.response;
            continue;
        }
        bool ok = true;
        for (const auto& [var, needle] : e.variables_contain) {
            auto it = request.variables.find(var);
            if (it == request.variables.end() || it->second.find(needle) == std::string::npos) {
                ok = false;
                break;
            }
        }
        if (ok) return &e.response;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// MockProvider

MockProvider::MockProvider(MockIndex index, MockScript script, MockOptions options)
    : index_(std::move(index)), script_(std::move(script)), options_(options) {}

std::vector<PaperRecord> MockProvider::search_once(const std::string& query,
                                                   const DateRange& date_filter, int result_cap) {
    return index_.search(query, date_filter, result_cap);
}

std::optional<std::string> MockProvider::fetch_once(const std::string& paper_id) {
    return index_.full_text(paper_id);
}

std::optional<PaperRecord> MockProvider::lookup_once(const std::string& paper_id) {
    return index_.lookup(paper_id);
}

ChatResponse MockProvider::chat_once(const std::string& rendered_prompt,
                                     const ChatRequest& request, const std::string& model_id) {
    std::string text;
    if (const std::string* canned = script_.match(request)) {
        text = *canned;
    } else {
        // spec'd key: (prompt_asset_id, variables digest, temperature, seed)
        std::uint64_t key = fnv1a64_mix(options_.seed, fnv1a64(request.digest()));
        text = dispatch(request, key);
    }
    ChatResponse response;
    response.text = text;
    response.usage.input_tokens = estimate_tokens(rendered_prompt);
    response.usage.output_tokens = estimate_tokens(text);
    response.model_id = model_id;
    return response;
}

namespace {

std::string var_or(const ChatRequest& r, const std::string& name, const std::string& fallback = {}) {
    auto it = r.variables.find(name);
    return it != r.variables.end() ? it->second : fallback;
}

std::string topic_of(const std::string& query_text, std::size_t max_words = 4) {
    static const std::set<std::string> stop = {"build", "theory", "how", "the", "and", "for",
                                               "can",   "with",  "that", "are", "into"};
    std::string topic;
    std::size_t used = 0;
    for (const auto& w : tokenize_words(query_text)) {
        if (stop.count(w)) continue;
        topic += (topic.empty() ? "" : " ") + w;
        if (++used >= max_words) break;
    }
    return topic.empty() ? "the studied phenomenon" : topic;
}

const char* kTheoryQualifiers[] = {"Emergent", "Adaptive",      "Latent",
                                   "Coupled",  "Hierarchical",  "Compositional",
                                   "Dynamic",  "Self-Limiting", "Threshold-Gated"};
const char* kTheoryNouns[] = {"Alignment", "Saturation",    "Transfer",  "Mediation",
                              "Scaffolding", "Consolidation", "Attenuation", "Amplification"};
const char* kMechanisms[] = {"feedback coupling",      "capacity saturation",
                             "representation overlap", "signal attenuation",
                             "resource contention",    "context accumulation"};

std::string degree_name(std::uint64_t pick) {
    switch (pick) {
        case 0: return "genuinely_new";
        case 1: return "derivable_unstated";
        case 2: return "explicit_peripheral";
        default: return "explicit_established";
    }
}

json make_mock_law(Rng& rng, const std::string& topic, const std::vector<EvidenceUuid>& uuids,
                   bool literature, std::size_t theory_idx, std::size_t law_idx) {
    json law;
    std::string noun = kTheoryNouns[rng.below(std::size(kTheoryNouns))];
    std::string mech = kMechanisms[rng.below(std::size(kMechanisms))];
    law["name"] = noun + " Law " + std::to_string(theory_idx) + "." + std::to_string(law_idx);
    bool increases = rng.below(2) == 0;
    law["statement"] = "In settings involving " + topic + ", " + mech + " " +
                       (increases ? "increases" : "reduces") +
                       " measured task outcomes relative to baselines without it.";
    law["law_type"] = rng.below(2) == 0 ? "qualitative" : "quantitative";
    law["scope"] = "Applies to " + topic + " under controlled evaluation; boundary conditions "
                   "follow the cited studies.";
    json cases = json::array();
    std::uint64_t n_cases = rng.below(3);
    for (std::uint64_t c = 0; c < n_cases; ++c) {
        cases.push_back("Does not apply when " + std::string(kMechanisms[rng.below(std::size(kMechanisms))]) +
                        " dominates (case " + std::to_string(c) + ").");
    }
    law["special_cases"] = cases;

    json evidence = json::array();
    if (literature && !uuids.empty()) {
        std::size_t n_cites = 1 + rng.below(std::min<std::size_t>(3, uuids.size()));
        std::size_t start = rng.below(uuids.size());
        json ids = json::array();
        std::set<std::string> used;
        for (std::size_t c = 0; c < n_cites; ++c) {
            std::string u = uuids[(start + c) % uuids.size()].to_string();
            if (used.insert(u).second) ids.push_back(u);
        }
        json ref;
        ref["description"] = "Extraction records reporting " + mech + " effects on " + topic + ".";
        ref["uuids"] = ids;
        evidence.push_back(ref);
    }
    law["evidence"] = evidence;

    json nov;
    // the first law of each theory stays "new" so filtering never empties a theory
    std::uint64_t label_pick = law_idx == 0 ? 0 : rng.below(10);
    std::string label = label_pick < 4   ? "new"
                        : label_pick < 7 ? "somewhat-related-to-existing"
                        : label_pick < 9 ? "closely-related-to-existing"
                                         : "existing";
    nov["what_exists"] = "Prior studies describe " + mech + " informally.";
    nov["what_is_novel"] = "The explicit link between " + mech + " and outcomes in " + topic + ".";
    nov["classification_explanation"] =
        "Existing work covers components separately; the combined statement is assessed as '" +
        label + "'.";
    nov["classification"] = label;
    json refs = json::array();
    if (rng.below(2) == 0) refs.push_back("Background survey on " + topic);
    nov["llm_generated_refs"] = refs;
    law["self_novelty"] = nov;
    return law;
}

}  // namespace

std::string MockProvider::dispatch(const ChatRequest& request, std::uint64_t key) const {
    Rng rng(key);
    const std::string& asset = request.prompt_asset_id;

    if (asset == prompt_assets::reformulate_query) {
        std::string q = var_or(request, "query_text");
        const std::string prefix = "Build a theory of";
        if (q.rfind(prefix, 0) == 0) q = trim(q.substr(prefix.size()));
        return q.empty() ? std::string{} : "empirical studies on " + q;
    }

    if (asset == prompt_assets::generate_schema) {
        json out;
        out["extraction_query"] =
            "Extract any mentions of systems, interventions, or findings relevant to: " +
            var_or(request, "query_text");
        json slots = json::array();
        auto add_slot = [&](const char* name, const char* desc) {
            json s;
            s["name"] = name;
            s["description"] = desc;
            slots.push_back(s);
        };
        add_slot("system_name", "The name of the system or method being studied.");
        add_slot("approach_summary", "A brief description of the approach and its key mechanisms.");
        add_slot("evaluation_setting", "The evaluation setting, datasets, and populations.");
        add_slot("outcomes_measured", "Which outcomes were measured and how.");
        add_slot("results_summary", "A concise summary of the quantitative and qualitative results.");
        add_slot("limitations_or_counter_evidence",
                 "Any reported limitations, null results, or counter-evidence.");
        out["slots"] = slots;
        return out.dump();
    }

    if (asset == prompt_assets::extract_evidence) {
        std::string paper_id = var_or(request, "paper_id");
        std::string title = var_or(request, "paper_title");
        auto markers = scan_evidence_markers(var_or(request, "paper_text"));
        std::vector<std::string> slot_names;
        for (const auto& line : split_lines(var_or(request, "schema_slots"))) {
            std::size_t colon = line.find(':');
            if (colon != std::string::npos) slot_names.push_back(trim(line.substr(0, colon)));
        }
        json records = json::array();
        for (std::size_t k = 0; k < markers.size(); ++k) {
            json rec;
            json header;
            header["source_info"] = title + " (" + paper_id + ")";
            header["name_short"] = markers[k].name;
            header["name_full"] = markers[k].name + " (" + paper_id + ")";
            header["brief_description"] =
                "Reported study of " + markers[k].name + " in " + paper_id + ".";
            header["citation_title"] = title;
            header["mention_or_use"] = markers[k].mention_or_use;
            rec["header"] = header;
            json values = json::object();
            for (const auto& slot : slot_names) {
                std::uint64_t h = fnv1a64(paper_id + "|" + slot + "|" + std::to_string(k), key);
                if (h % 5 == 0) {
                    values[slot] = nullptr;  // the paper is silent on this slot
                } else {
                    char hex[17];
                    std::snprintf(hex, sizeof(hex), "%08llx",
                                  static_cast<unsigned long long>(h & 0xffffffffull));
                    values[slot] = slot + " finding for " + markers[k].name + " [" + hex + "]";
                }
            }
            rec["slot_values"] = values;
            rec["relevant"] = true;
            records.push_back(rec);
        }
        json out;
        out["records"] = records;
        return out.dump();
    }

    if (asset == prompt_assets::merge_extractions) {
        json out;
        json records = json::array();
        std::set<std::string> seen;
        for (const auto& chunk : parse_json(var_or(request, "chunks_json", "[]"))) {
            for (const auto& rec : chunk) {
                std::string name = rec.contains("header") ? rec["header"].value("name_short", "")
                                                          : std::string{};
                if (!name.empty() && !seen.insert(name).second) continue;
                records.push_back(rec);
            }
        }
        out["records"] = records;
        return out.dump();
    }

    if (asset == prompt_assets::mine_references) {
        json out;
        json refs = json::array();
        for (const auto& id : scan_reference_markers(var_or(request, "paper_text"))) {
            refs.push_back(id);
        }
        out["references"] = refs;
        return out.dump();
    }

    if (asset == prompt_assets::synthesize_theories) {
        std::string topic = topic_of(var_or(request, "query_text"));
        bool literature = var_or(request, "knowledge") == "literature";
        auto uuids = scan_evidence_uuids(var_or(request, "evidence_text"));
        int requested = options_.default_theories_per_call;
        try {
            requested = std::stoi(var_or(request, "theories_requested",
                                         std::to_string(requested)));
        } catch (...) {
        }
        json theories = json::array();
        for (int t = 0; t < requested; ++t) {
            json theory;
            std::string qualifier = kTheoryQualifiers[rng.below(std::size(kTheoryQualifiers))];
            std::string noun = kTheoryNouns[rng.below(std::size(kTheoryNouns))];
            theory["name"] = qualifier + " " + noun + " Theory of " + topic + " (" +
                             std::to_string(t) + ")";
            theory["description"] =
                "Asserts that " + topic + " is governed by " +
                kMechanisms[rng.below(std::size(kMechanisms))] +
                ", with effects conditioned on evaluation context.";
            json laws = json::array();
            std::size_t n_laws = 1 + rng.below(2);
            for (std::size_t l = 0; l < n_laws; ++l) {
                laws.push_back(make_mock_law(rng, topic, uuids, literature,
                                             static_cast<std::size_t>(t), l));
            }
            theory["laws"] = laws;
            theories.push_back(theory);
        }
        json out;
        out["theories"] = theories;
        return out.dump();
    }

    if (asset == prompt_assets::reflect_theory) {
        json out;
        out["theory"] = parse_json(var_or(request, "theory_json", "{}"));
        return out.dump();
    }

    if (asset == prompt_assets::judge_law) {
        json out;
        out["score"] = 1 + static_cast<int>(rng.below(10));
        out["rationale"] = "Deterministic fixture rating for dimension '" +
                           var_or(request, "dimension") + "'.";
        return out.dump();
    }

    if (asset == prompt_assets::generate_rubric) {
        std::string topic = topic_of(var_or(request, "law_statement"), 2);
        json preds = json::array();
        const char* aspects[] = {"effect_direction", "dose_response", "boundary_condition",
                                 "mechanism_signature", "transfer_effect"};
        for (int i = 0; i < 5; ++i) {
            json p;
            p["short_name"] = std::string(aspects[i]) + "_p" + std::to_string(i);
            p["specific_prediction"] = "Studies of " + topic + " report " +
                                       std::string(aspects[i]) + " consistent with the law.";
            p["operational_signals"] = json::array(
                {"Controlled comparison isolating the mechanism",
                 "Quantitative outcome metrics across conditions"});
            p["strong_test_requirement"] =
                "A paper must report the comparison with and without the intervention for " +
                topic + ".";
            p["support_criteria"] = "The measured effect moves in the predicted direction.";
            p["contradiction_criteria"] =
                "No significant effect, or movement opposite the predicted direction.";
            preds.push_back(p);
        }
        json out;
        out["predictions"] = preds;
        return out.dump();
    }

    if (asset == prompt_assets::judge_evidence) {
        json out;
        double u = rng.unit();
        if (u < 0.22) {
            out["verdict"] = "support";
        } else if (u < 0.30) {
            out["verdict"] = "contradict";
        } else {
            out["verdict"] = "no_evidence";
        }
        if (out["verdict"] != "no_evidence") {
            out["evidence_locator"] = "Section " + std::to_string(2 + rng.below(5)) + ", Figure " +
                                      std::to_string(1 + rng.below(6));
        } else {
            out["evidence_locator"] = "";
        }
        out["rationale"] = "Deterministic fixture judgment against the strong test requirement.";
        return out.dump();
    }

    if (asset == prompt_assets::self_belief_vote) {
        json out;
        out["vote"] = rng.unit() < 0.75;
        return out.dump();
    }

    if (asset == prompt_assets::novelty_per_paper) {
        json out;
        double u = rng.unit();
        std::uint64_t pick = u < 0.35 ? 0 : u < 0.65 ? 1 : u < 0.85 ? 2 : 3;
        out["degree"] = degree_name(pick);
        out["rationale"] = "Deterministic fixture per-paper novelty assessment.";
        return out.dump();
    }

    if (asset == prompt_assets::novelty_consolidate) {
        // inputs arrive ordered most -> least novel; consolidate to the most
        // novel degree present
        std::string text = var_or(request, "assessments_text");
        std::string degree = "explicit_established";
        std::size_t best = std::string::npos;
        for (std::uint64_t d = 0; d < 4; ++d) {
            std::size_t pos = text.find(degree_name(d));
            if (pos != std::string::npos && pos < best) {
                best = pos;
                degree = degree_name(d);
            }
        }
        json out;
        out["what_is_known"] = "The reference corpus covers adjacent components of the claim.";
        out["what_introduced"] = "The law states the combined regularity explicitly.";
        out["what_novel"] = "The combination is assessed as '" + degree +
                            "' relative to the reference corpus.";
        out["degree"] = degree;
        return out.dump();
    }

    if (asset == prompt_assets::judge_duplicate) {
        std::string a = trim(var_or(request, "law_a_statement"));
        std::string b = trim(var_or(request, "law_b_statement"));
        bool dup = a == b;  // equality-oracle default scripting
        json out;
        out["core_claim_a"] = a;
        out["core_claim_b"] = b;
        json sims = json::array();
        json sim;
        sim["text"] = dup ? "Both laws state the same core regularity."
                          : "Both laws concern related experimental settings.";
        sim["tag"] = dup ? "ESSENTIAL" : "NON_ESSENTIAL";
        sims.push_back(sim);
        out["similarities"] = sims;
        json diffs = json::array();
        if (!dup) {
            json diff;
            diff["text"] = "The prescribed mechanisms differ.";
            diff["tag"] = "ESSENTIAL";
            diffs.push_back(diff);
        }
        out["differences"] = diffs;
        out["reasoning"] = dup ? "The statements are textually identical."
                               : "The core claims prescribe different mechanisms.";
        out["verdict"] = dup ? "duplicates" : "not_duplicates";
        return out.dump();
    }

    if (asset == prompt_assets::generate_queries) {
        std::string topic = topic_of(var_or(request, "paper_title"), 5);
        json out;
        out["general"] = "Build a theory of how " + topic + " shapes downstream task behavior.";
        out["specific"] = "Build a theory of the mechanisms by which " + topic +
                          " operates under constrained evaluation settings, including moderating "
                          "factors.";
        return out.dump();
    }

    throw ProviderError("no scripted response for prompt asset '" + asset + "'",
                        /*is_transient=*/false);
}

}  // namespace theorygen
