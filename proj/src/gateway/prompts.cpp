#include "theorygen/gateway/prompts.hpp"

#include "theorygen/core/errors.hpp"

namespace theorygen {

namespace {

// clang-format off
const std::pair<const char*, const char*> kTemplates[] = {
    {prompt_assets::reformulate_query,
     "Rewrite the theory query below as a focused literature search query.\n"
     "Return only the search query text.\n\n"
     "Theory query: {{query_text}}\n"},

    {prompt_assets::generate_schema,
     "Design an extraction schema tailored to the theory query below. The schema\n"
     "must name the entities, variables, and empirical results needed to support\n"
     "theory induction. Respond as JSON with fields \"extraction_query\" (string)\n"
     "and \"slots\" (array of {\"name\", \"description\"}); slot names are lowercase\n"
     "with underscores and there are at least three of them.\n\n"
     "Theory query: {{query_text}}\n"},

    {prompt_assets::extract_evidence,
     "Populate the extraction schema below with document-specific values from the\n"
     "paper. Report one record per distinct system or finding mentioned; return\n"
     "JSON {\"records\": [...]} where each record has \"header\" (source_info,\n"
     "name_short, name_full, brief_description, citation_title, mention_or_use),\n"
     "\"slot_values\" (one value per schema slot, null where the paper is silent)\n"
     "and \"relevant\" (boolean). Return {\"records\": []} if the paper is irrelevant.\n\n"
     "Extraction query: {{extraction_query}}\n"
     "Schema slots:\n{{schema_slots}}\n\n"
     "Paper: {{paper_title}} ({{paper_id}})\n"
     "Full text:\n{{paper_text}}\n"},

    {prompt_assets::merge_extractions,
     "The records below were extracted from consecutive chunks of one paper.\n"
     "Merge duplicates describing the same system and return JSON\n"
     "{\"records\": [...]} in the same record shape.\n\n"
     "Paper id: {{paper_id}}\n"
     "Chunk records:\n{{chunks_json}}\n"},

    {prompt_assets::mine_references,
     "List the identifiers of works referenced by the paper text below.\n"
     "Respond as JSON {\"references\": [\"id\", ...]}.\n\n"
     "Paper id: {{paper_id}}\n"
     "Full text:\n{{paper_text}}\n"},

    {prompt_assets::synthesize_theories,
     "Induce candidate scientific theories for the query below. Each theory needs\n"
     "a name, a description, and one or more laws; each law needs a name, a\n"
     "statement, a law_type (qualitative or quantitative), a scope, special_cases,\n"
     "an evidence list of {description, uuids} grounded ONLY in the evidence\n"
     "records provided, and a self_novelty assessment (what_exists, what_is_novel,\n"
     "classification_explanation, classification, llm_generated_refs). With no\n"
     "evidence provided, rely on parametric knowledge and cite no uuids.\n"
     "Respond as JSON {\"theories\": [...]}.\n\n"
     "Theory query: {{query_text}}\n"
     "Knowledge condition: {{knowledge}}\n"
     "Generation objective: {{objective}}\n"
     "Theories requested: {{theories_requested}}\n\n"
     "Evidence records:\n{{evidence_text}}\n"},

    {prompt_assets::reflect_theory,
     "Refine the theory below for internal consistency, evidence attribution, and\n"
     "specificity. Cite only uuids from the available list. Respond as JSON\n"
     "{\"theory\": {...}} in the same shape as the input.\n\n"
     "Available evidence uuids: {{available_uuids}}\n"
     "Theory:\n{{theory_json}}\n"},

    {prompt_assets::judge_law,
     "Rate the law below on the dimension \"{{dimension}}\" using a 1-10 Likert\n"
     "scale (1 low, 10 high). Respond as JSON {\"score\": <int>, \"rationale\": ...}.\n\n"
     "Parent theory: {{theory_description}}\n"
     "Law name: {{law_name}}\n"
     "Law statement: {{law_statement}}\n"
     "Scope: {{law_scope}}\n"},

    {prompt_assets::generate_rubric,
     "Generate a detailed set of empirical predictions that would be expected to\n"
     "hold if the law below were true (about five). Each prediction is a schema\n"
     "with short_name, specific_prediction, operational_signals (array),\n"
     "strong_test_requirement, support_criteria, contradiction_criteria.\n"
     "Respond as JSON {\"predictions\": [...]}.\n\n"
     "Law name: {{law_name}}\n"
     "Law statement: {{law_statement}}\n"
     "Scope: {{law_scope}}\n"},

    {prompt_assets::judge_evidence,
     "Decide whether the paper below supports, contradicts, or does not inform\n"
     "the prediction. Honor the strong test requirement: a paper that does not\n"
     "report the required comparison is no_evidence. Respond as JSON {\"verdict\":\n"
     "\"support\"|\"contradict\"|\"no_evidence\", \"evidence_locator\": ...,\n"
     "\"rationale\": ...}; a support or contradict verdict must quote or point to\n"
     "the deciding passage in evidence_locator.\n\n"
     "Prediction:\n{{prediction_json}}\n\n"
     "Paper: {{paper_title}}\n"
     "Full text:\n{{paper_text}}\n"},

    {prompt_assets::self_belief_vote,
     "Based solely on your parametric knowledge, will the predictions of the\n"
     "following law hold? Respond as JSON {\"vote\": true|false}.\n\n"
     "Law: {{claim}}\n"
     "Sample: {{sample_index}}\n"},

    {prompt_assets::novelty_per_paper,
     "Assess the novelty of the law relative to the single reference paper below,\n"
     "for the dimension \"{{dimension}}\". Respond as JSON {\"degree\":\n"
     "\"genuinely_new\"|\"derivable_unstated\"|\"explicit_peripheral\"|\n"
     "\"explicit_established\", \"rationale\": ...}.\n\n"
     "Law statement: {{law_statement}}\n"
     "Scope: {{law_scope}}\n"
     "Reference paper: {{paper_title}}\n"
     "Full text:\n{{paper_text}}\n"},

    {prompt_assets::novelty_consolidate,
     "Consolidate the per-paper novelty assessments below (already ordered from\n"
     "most to least novel) into one decision for the dimension \"{{dimension}}\".\n"
     "Respond as JSON {\"what_is_known\": ..., \"what_introduced\": ...,\n"
     "\"what_novel\": ..., \"degree\": \"genuinely_new\"|\"derivable_unstated\"|\n"
     "\"explicit_peripheral\"|\"explicit_established\"}.\n\n"
     "Law statement: {{law_statement}}\n"
     "Per-paper assessments:\n{{assessments_text}}\n"},

    {prompt_assets::judge_duplicate,
     "Decide whether the two laws below make substantially the same core claim.\n"
     "Respond as JSON {\"core_claim_a\": ..., \"core_claim_b\": ...,\n"
     "\"similarities\": [{\"text\", \"tag\": \"ESSENTIAL\"|\"NON_ESSENTIAL\"}, ...],\n"
     "\"differences\": [same shape], \"reasoning\": ..., \"verdict\":\n"
     "\"duplicates\"|\"not_duplicates\"}.\n\n"
     "Law A ({{law_a_name}}): {{law_a_statement}}\n"
     "Law B ({{law_b_name}}): {{law_b_statement}}\n"},

    {prompt_assets::generate_queries,
     "From the paper below, write two theory queries targeting its central\n"
     "research theme: one general and one specific. Both must begin with\n"
     "\"Build a theory of\". Respond as JSON {\"general\": ..., \"specific\": ...}.\n\n"
     "Paper: {{paper_title}}\n"
     "Text:\n{{paper_text}}\n"},
};
// clang-format on

}  // namespace

PromptLibrary::PromptLibrary() {
    for (const auto& [id, text] : kTemplates) templates_[id] = text;
}

bool PromptLibrary::has(const std::string& asset_id) const {
    return templates_.count(asset_id) > 0;
}

const std::string& PromptLibrary::text(const std::string& asset_id) const {
    auto it = templates_.find(asset_id);
    if (it == templates_.end()) {
        throw ValidationError("unknown prompt asset: '" + asset_id + "'");
    }
    return it->second;
}

std::string PromptLibrary::render(const ChatRequest& request) const {
    const std::string& tpl = text(request.prompt_asset_id);
    std::string out;
    out.reserve(tpl.size());
    std::vector<std::string> unbound;
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        std::size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            break;
        }
        out.append(tpl, pos, open - pos);
        std::size_t close = tpl.find("}}", open + 2);
        if (close == std::string::npos) {
            throw ValidationError("prompt template '" + request.prompt_asset_id +
                                  "' has an unterminated placeholder");
        }
        std::string name = tpl.substr(open + 2, close - open - 2);
        auto it = request.variables.find(name);
        if (it == request.variables.end()) {
            unbound.push_back(name);
        } else {
            out += it->second;
        }
        pos = close + 2;
    }
    if (!unbound.empty()) {
        std::string names;
        for (const auto& n : unbound) names += (names.empty() ? "" : ", ") + n;
        throw ValidationError("unbound placeholders in '" + request.prompt_asset_id +
                              "': " + names);
    }
    return out;
}

std::vector<std::string> PromptLibrary::asset_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : templates_) ids.push_back(id);
    return ids;
}

}  // namespace theorygen
