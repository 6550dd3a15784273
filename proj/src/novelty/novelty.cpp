#include "theorygen/novelty/novelty.hpp"

#include <algorithm>

namespace theorygen {

std::string_view to_string(NoveltyDimension d) {
    switch (d) {
        case NoveltyDimension::phenomenon_effect: return "phenomenon_effect";
        case NoveltyDimension::explanation: return "explanation";
        case NoveltyDimension::unification: return "unification";
        case NoveltyDimension::generalization_scope_expansion:
            return "generalization_scope_expansion";
        case NoveltyDimension::limitation_scope_constraint: return "limitation_scope_constraint";
        case NoveltyDimension::conceptual_reframing_abstraction:
            return "conceptual_reframing_abstraction";
        case NoveltyDimension::empirical_synthesis_meta_regularity:
            return "empirical_synthesis_meta_regularity";
    }
    return "phenomenon_effect";
}

NoveltyDimension parse_novelty_dimension(const std::string& s) {
    for (NoveltyDimension d : all_novelty_dimensions()) {
        if (s == to_string(d)) return d;
    }
    throw ValidationError("unknown novelty dimension: '" + s + "'");
}

const std::vector<NoveltyDimension>& all_novelty_dimensions() {
    static const std::vector<NoveltyDimension> dims = {
        NoveltyDimension::phenomenon_effect,
        NoveltyDimension::explanation,
        NoveltyDimension::unification,
        NoveltyDimension::generalization_scope_expansion,
        NoveltyDimension::limitation_scope_constraint,
        NoveltyDimension::conceptual_reframing_abstraction,
        NoveltyDimension::empirical_synthesis_meta_regularity,
    };
    return dims;
}

std::string_view to_string(NoveltyDegree d) {
    switch (d) {
        case NoveltyDegree::genuinely_new: return "genuinely_new";
        case NoveltyDegree::derivable_unstated: return "derivable_unstated";
        case NoveltyDegree::explicit_peripheral: return "explicit_peripheral";
        case NoveltyDegree::explicit_established: return "explicit_established";
    }
    return "explicit_established";
}

NoveltyDegree parse_novelty_degree(const std::string& s) {
    if (s == "genuinely_new") return NoveltyDegree::genuinely_new;
    if (s == "derivable_unstated") return NoveltyDegree::derivable_unstated;
    if (s == "explicit_peripheral") return NoveltyDegree::explicit_peripheral;
    if (s == "explicit_established") return NoveltyDegree::explicit_established;
    throw ValidationError("unknown novelty degree: '" + s + "'");
}

int degree_ordinal(NoveltyDegree d) { return static_cast<int>(d); }

const std::set<NoveltyDegree>& default_novel_degrees() {
    static const std::set<NoveltyDegree> degrees = {NoveltyDegree::genuinely_new,
                                                    NoveltyDegree::derivable_unstated};
    return degrees;
}

json PerPaperNovelty::to_json() const {
    json j = extra;
    j["law_id"] = law_id;
    j["paper_id"] = paper_id;
    j["dimension"] = std::string(to_string(dimension));
    j["degree"] = std::string(to_string(degree));
    j["rationale"] = rationale;
    if (audit_flag) j["audit_flag"] = *audit_flag;
    return j;
}

PerPaperNovelty PerPaperNovelty::from_json(const json& j) {
    JsonReader r(j, "PerPaperNovelty");
    PerPaperNovelty a;
    a.law_id = r.require_string("law_id");
    a.paper_id = r.require_string("paper_id");
    a.dimension = parse_novelty_dimension(r.require_string("dimension"));
    a.degree = parse_novelty_degree(r.require_string("degree"));
    a.rationale = r.string_or("rationale", "");
    if (const json* v = r.find("audit_flag")) a.audit_flag = v->get<std::string>();
    a.extra = r.take_extra();
    return a;
}

void ConsolidatedNovelty::validate(const std::set<NoveltyDegree>& novel_degrees) const {
    if (novel_flag != (novel_degrees.count(degree) > 0)) {
        throw ValidationError("novel_flag inconsistent with degree for " + law_id);
    }
}

json ConsolidatedNovelty::to_json() const {
    json j = extra;
    j["law_id"] = law_id;
    j["dimension"] = std::string(to_string(dimension));
    j["what_is_known"] = what_is_known;
    j["what_introduced"] = what_introduced;
    j["what_novel"] = what_novel;
    j["degree"] = std::string(to_string(degree));
    j["novel_flag"] = novel_flag;
    json order = json::array();
    for (const auto& id : input_paper_order) order.push_back(id);
    j["input_paper_order"] = order;
    return j;
}

ConsolidatedNovelty ConsolidatedNovelty::from_json(const json& j) {
    JsonReader r(j, "ConsolidatedNovelty");
    ConsolidatedNovelty c;
    c.law_id = r.require_string("law_id");
    c.dimension = parse_novelty_dimension(r.require_string("dimension"));
    c.what_is_known = r.string_or("what_is_known", "");
    c.what_introduced = r.string_or("what_introduced", "");
    c.what_novel = r.string_or("what_novel", "");
    c.degree = parse_novelty_degree(r.require_string("degree"));
    c.novel_flag = r.require("novel_flag").get<bool>();
    if (const json* v = r.find("input_paper_order")) {
        for (const auto& e : *v) c.input_paper_order.push_back(e.get<std::string>());
    }
    c.extra = r.take_extra();
    return c;
}

PerPaperNovelty judge_paper_novelty(Gateway& gateway, const LawRef& law, const PaperRecord& paper,
                                    NoveltyDimension dimension) {
    PerPaperNovelty assessment;
    assessment.law_id = law.law_id();
    assessment.paper_id = paper.paper_id;
    assessment.dimension = dimension;

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::novelty_per_paper;
    request.variables["law_statement"] = law.law.statement;
    request.variables["law_scope"] = law.law.scope;
    request.variables["dimension"] = std::string(to_string(dimension));
    request.variables["paper_title"] = paper.title;
    request.variables["paper_text"] = paper.full_text;
    request.variables["paper_id"] = paper.paper_id;
    request.variables["law_id"] = law.law_id();
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"degree", "rationale"};
    request.stage = "novelty-per-paper";

    try {
        json j = parse_json(gateway.chat(request).text);
        assessment.degree = parse_novelty_degree(j["degree"].get<std::string>());
        assessment.rationale = j.value("rationale", "");
    } catch (const ContractViolation& e) {
        assessment.degree = NoveltyDegree::explicit_established;
        assessment.rationale = "contract violation";
        assessment.audit_flag = e.what();
    } catch (const ValidationError& e) {
        assessment.degree = NoveltyDegree::explicit_established;
        assessment.rationale = "invalid degree label";
        assessment.audit_flag = e.what();
    }
    return assessment;
}

std::vector<PerPaperNovelty> sort_descending_novelty(std::vector<PerPaperNovelty> assessments) {
    std::stable_sort(assessments.begin(), assessments.end(),
                     [](const PerPaperNovelty& a, const PerPaperNovelty& b) {
                         if (a.degree != b.degree) {
                             return degree_ordinal(a.degree) < degree_ordinal(b.degree);
                         }
                         return a.paper_id < b.paper_id;
                     });
    return assessments;
}

ConsolidatedNovelty consolidate(Gateway& gateway, const LawRef& law, NoveltyDimension dimension,
                                std::vector<PerPaperNovelty> assessments,
                                const std::set<NoveltyDegree>& novel_degrees) {
    for (const auto& a : assessments) {
        if (a.dimension != dimension) {
            throw ValidationError("consolidate received an assessment for the wrong dimension");
        }
    }
    assessments = sort_descending_novelty(std::move(assessments));

    std::string assessments_text;
    std::vector<std::string> order;
    for (const auto& a : assessments) {
        order.push_back(a.paper_id);
        assessments_text += "paper " + a.paper_id + ": " + std::string(to_string(a.degree)) +
                            " - " + a.rationale + "\n";
    }

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::novelty_consolidate;
    request.variables["law_statement"] = law.law.statement;
    request.variables["dimension"] = std::string(to_string(dimension));
    request.variables["assessments_text"] = assessments_text;
    request.variables["law_id"] = law.law_id();
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"what_is_known", "what_introduced", "what_novel", "degree"};
    request.stage = "novelty-consolidate";

    ConsolidatedNovelty result;
    result.law_id = law.law_id();
    result.dimension = dimension;
    result.input_paper_order = order;
    try {
        json j = parse_json(gateway.chat(request).text);
        result.what_is_known = j["what_is_known"].get<std::string>();
        result.what_introduced = j["what_introduced"].get<std::string>();
        result.what_novel = j["what_novel"].get<std::string>();
        result.degree = parse_novelty_degree(j["degree"].get<std::string>());
    } catch (const ContractViolation& e) {
        throw StageError("novelty-consolidate", e.what());
    } catch (const ValidationError& e) {
        throw StageError("novelty-consolidate", e.what());
    }
    result.novel_flag = novel_degrees.count(result.degree) > 0;
    result.validate(novel_degrees);
    return result;
}

json NoveltyTable::to_json() const {
    json j;
    json props = json::object();
    for (const auto& [label, by_dim] : proportions) {
        json row = json::object();
        for (const auto& [dim, value] : by_dim) row[std::string(to_string(dim))] = value;
        props[label] = row;
    }
    j["proportions"] = props;
    json sizes = json::object();
    for (const auto& [label, n] : sample_sizes) sizes[label] = n;
    j["sample_sizes"] = sizes;
    return j;
}

NoveltyTable novelty_proportion_table(const std::vector<LawNoveltyEvaluation>& laws) {
    NoveltyTable table;
    std::map<std::string, std::map<NoveltyDimension, long>> novel_counts;
    std::map<std::string, long> totals;
    for (const auto& law : laws) {
        std::string label = law.condition.label();
        totals[label] += 1;
        for (const auto& c : law.consolidated) {
            if (c.novel_flag) novel_counts[label][c.dimension] += 1;
        }
    }
    for (const auto& [label, n] : totals) {
        table.sample_sizes[label] = n;
        for (NoveltyDimension dim : all_novelty_dimensions()) {
            long count = 0;
            auto lit = novel_counts.find(label);
            if (lit != novel_counts.end()) {
                auto dit = lit->second.find(dim);
                if (dit != lit->second.end()) count = dit->second;
            }
            table.proportions[label][dim] =
                n > 0 ? static_cast<double>(count) / static_cast<double>(n) : 0.0;
        }
    }
    return table;
}

}  // namespace theorygen
