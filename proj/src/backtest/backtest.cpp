#include "theorygen/backtest/backtest.hpp"

#include <algorithm>
#include <set>

#include "theorygen/core/log.hpp"

namespace theorygen {

void Prediction::validate() const {
    if (short_name.empty()) throw ValidationError("prediction needs a short_name");
    if (specific_prediction.empty() || operational_signals.empty() ||
        strong_test_requirement.empty() || support_criteria.empty() ||
        contradiction_criteria.empty()) {
        throw ValidationError("prediction '" + short_name + "' has an empty content field");
    }
}

json Prediction::to_json() const {
    json j = extra;
    j["short_name"] = short_name;
    j["specific_prediction"] = specific_prediction;
    json signals = json::array();
    for (const auto& s : operational_signals) signals.push_back(s);
    j["operational_signals"] = signals;
    j["strong_test_requirement"] = strong_test_requirement;
    j["support_criteria"] = support_criteria;
    j["contradiction_criteria"] = contradiction_criteria;
    return j;
}

Prediction Prediction::from_json(const json& j) {
    JsonReader r(j, "Prediction");
    Prediction p;
    p.short_name = r.require_string("short_name");
    p.specific_prediction = r.require_string("specific_prediction");
    for (const auto& e : r.require("operational_signals")) p.operational_signals.push_back(e.get<std::string>());
    p.strong_test_requirement = r.require_string("strong_test_requirement");
    p.support_criteria = r.require_string("support_criteria");
    p.contradiction_criteria = r.require_string("contradiction_criteria");
    p.extra = r.take_extra();
    p.validate();
    return p;
}

void PredictionRubric::validate() const {
    if (law_id.empty()) throw ValidationError("rubric needs a law id");
    std::set<std::string> names;
    for (const auto& p : predictions) {
        p.validate();
        if (!names.insert(p.short_name).second) {
            throw ValidationError("duplicate prediction short_name '" + p.short_name +
                                  "' in rubric for " + law_id);
        }
    }
}

json PredictionRubric::to_json() const {
    json j = extra;
    j["law_id"] = law_id;
    json preds = json::array();
    for (const auto& p : predictions) preds.push_back(p.to_json());
    j["predictions"] = preds;
    return j;
}

PredictionRubric PredictionRubric::from_json(const json& j) {
    JsonReader r(j, "PredictionRubric");
    PredictionRubric rubric;
    rubric.law_id = r.require_string("law_id");
    for (const auto& e : r.require("predictions")) {
        rubric.predictions.push_back(Prediction::from_json(e));
    }
    rubric.extra = r.take_extra();
    rubric.validate();
    return rubric;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::support: return "support";
        case Verdict::contradict: return "contradict";
        case Verdict::no_evidence: return "no_evidence";
    }
    return "no_evidence";
}

Verdict parse_verdict(const std::string& s) {
    if (s == "support") return Verdict::support;
    if (s == "contradict") return Verdict::contradict;
    if (s == "no_evidence") return Verdict::no_evidence;
    throw ValidationError("unknown verdict: '" + s + "'");
}

void EvidenceJudgment::validate() const {
    if (verdict != Verdict::no_evidence && evidence_locator.empty()) {
        throw ValidationError("a " + std::string(to_string(verdict)) +
                              " verdict requires an evidence locator");
    }
}

json EvidenceJudgment::to_json() const {
    json j = extra;
    j["law_id"] = law_id;
    j["prediction_short_name"] = prediction_short_name;
    j["paper_id"] = paper_id;
    j["verdict"] = std::string(to_string(verdict));
    j["evidence_locator"] = evidence_locator;
    j["rationale"] = rationale;
    if (audit_flag) j["audit_flag"] = *audit_flag;
    return j;
}

EvidenceJudgment EvidenceJudgment::from_json(const json& j) {
    JsonReader r(j, "EvidenceJudgment");
    EvidenceJudgment e;
    e.law_id = r.require_string("law_id");
    e.prediction_short_name = r.require_string("prediction_short_name");
    e.paper_id = r.require_string("paper_id");
    e.verdict = parse_verdict(r.require_string("verdict"));
    e.evidence_locator = r.string_or("evidence_locator", "");
    e.rationale = r.string_or("rationale", "");
    if (const json* v = r.find("audit_flag")) e.audit_flag = v->get<std::string>();
    e.extra = r.take_extra();
    e.validate();
    return e;
}

// ---------------------------------------------------------------------------

PredictionRubric generate_rubric(Gateway& gateway, const LawRef& law) {
    law.law.validate();
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::generate_rubric;
    request.variables["law_name"] = law.law.name;
    request.variables["law_statement"] = law.law.statement;
    request.variables["law_scope"] = law.law.scope;
    request.variables["law_id"] = law.law_id();
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"predictions"};
    request.stage = "backtest-rubric";

    ChatResponse response = gateway.chat(request);
    PredictionRubric rubric;
    rubric.law_id = law.law_id();
    for (const auto& e : parse_json(response.text)["predictions"]) {
        rubric.predictions.push_back(Prediction::from_json(e));
    }
    rubric.validate();
    return rubric;
}

std::vector<PaperRecord> find_evaluation_papers(Gateway& gateway, const PredictionRubric& rubric,
                                                const std::string& law_statement,
                                                const KnowledgeWindow& window,
                                                int per_search_cap) {
    window.validate();
    DateRange holdout = window.holdout_range();

    std::vector<PaperRecord> all;
    std::set<std::string> seen;
    auto collect = [&](const std::string& query) {
        if (query.empty()) return;
        for (auto& p : gateway.search_papers(query, holdout, per_search_cap)) {
            if (!seen.insert(p.paper_id).second) continue;
            p.extra.erase("relevance_score");
            all.push_back(std::move(p));
        }
    };
    for (const auto& pred : rubric.predictions) collect(pred.specific_prediction);
    collect(law_statement);

    std::sort(all.begin(), all.end(), [](const PaperRecord& a, const PaperRecord& b) {
        if (a.publication_date != b.publication_date) {
            return a.publication_date < b.publication_date;
        }
        return a.paper_id < b.paper_id;
    });
    return all;
}

EvidenceJudgment judge_evidence(Gateway& gateway, const PaperRecord& paper,
                                const Prediction& prediction, const std::string& law_id) {
    EvidenceJudgment judgment;
    judgment.law_id = law_id;
    judgment.prediction_short_name = prediction.short_name;
    judgment.paper_id = paper.paper_id;

    if (paper.full_text.empty()) {
        judgment.verdict = Verdict::no_evidence;
        judgment.rationale = "no obtainable full text";
        return judgment;
    }

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::judge_evidence;
    request.variables["prediction_json"] = canonical_dump(prediction.to_json());
    request.variables["paper_title"] = paper.title;
    request.variables["paper_text"] = paper.full_text;
    request.variables["law_id"] = law_id;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"verdict", "evidence_locator", "rationale"};
    request.stage = "backtest-judge";

    try {
        json j = parse_json(gateway.chat(request).text);
        judgment.verdict = parse_verdict(j["verdict"].get<std::string>());
        judgment.evidence_locator = j.value("evidence_locator", "");
        judgment.rationale = j.value("rationale", "");
        judgment.validate();
    } catch (const ContractViolation& e) {
        judgment.verdict = Verdict::no_evidence;
        judgment.evidence_locator.clear();
        judgment.rationale = "contract violation";
        judgment.audit_flag = e.what();
    } catch (const ValidationError& e) {
        judgment.verdict = Verdict::no_evidence;
        judgment.evidence_locator.clear();
        judgment.rationale = "invalid judgment payload";
        judgment.audit_flag = e.what();
    }
    return judgment;
}

std::optional<double> prediction_precision(const std::vector<EvidenceJudgment>& judgments) {
    if (!judgments.empty()) {
        const std::string& name = judgments.front().prediction_short_name;
        for (const auto& j : judgments) {
            if (j.prediction_short_name != name) {
                throw ValidationError("prediction_precision judgments must share one prediction");
            }
        }
    }
    long supp = 0, cont = 0;
    for (const auto& j : judgments) {
        if (j.verdict == Verdict::support) ++supp;
        if (j.verdict == Verdict::contradict) ++cont;
    }
    if (supp + cont == 0) return std::nullopt;  // no-evidence marker
    return static_cast<double>(supp) / static_cast<double>(supp + cont);
}

std::optional<double> law_precision(const PredictionRubric& rubric,
                                    const std::vector<EvidenceJudgment>& judgments) {
    double sum = 0.0;
    long evidenced = 0;
    for (const auto& pred : rubric.predictions) {
        std::vector<EvidenceJudgment> mine;
        for (const auto& j : judgments) {
            if (j.prediction_short_name == pred.short_name) mine.push_back(j);
        }
        if (auto p = prediction_precision(mine)) {
            sum += *p;
            ++evidenced;
        }
    }
    if (evidenced == 0) return std::nullopt;
    return sum / static_cast<double>(evidenced);
}

json PrecisionRecallReport::to_json() const {
    json j;
    json per_law = json::object();
    for (const auto& [law_id, p] : per_law_precision) {
        per_law[law_id] = p ? json(*p) : json(nullptr);
    }
    j["per_law_precision"] = per_law;
    j["mean_law_precision"] = mean_law_precision ? json(*mean_law_precision) : json(nullptr);
    j["law_recall"] = law_recall;
    j["prediction_recall"] = prediction_recall;
    j["law_paper_evaluations"] = law_paper_evaluations;
    j["papers_with_relevant_experiments"] = papers_with_relevant_experiments;
    j["unique_papers_with_relevant_experiments"] = unique_papers_with_relevant_experiments;
    j["laws_with_relevant_paper"] = laws_with_relevant_paper;
    j["avg_papers_per_law_with_evidence"] =
        avg_papers_per_law_with_evidence ? json(*avg_papers_per_law_with_evidence) : json(nullptr);
    return j;
}

PrecisionRecallReport compute_recall(const std::vector<LawJudgments>& laws) {
    PrecisionRecallReport report;
    long total_predictions = 0;
    long evidenced_predictions = 0;
    std::set<std::string> global_relevant_papers;
    double precision_sum = 0.0;
    long precision_n = 0;

    for (const auto& law : laws) {
        std::set<std::string> papers_judged;
        std::set<std::string> papers_relevant;
        for (const auto& j : law.judgments) {
            papers_judged.insert(j.paper_id);
            if (j.verdict != Verdict::no_evidence) {
                papers_relevant.insert(j.paper_id);
                global_relevant_papers.insert(j.paper_id);
            }
        }
        report.law_paper_evaluations += static_cast<long>(papers_judged.size());
        report.papers_with_relevant_experiments += static_cast<long>(papers_relevant.size());
        if (!papers_relevant.empty()) ++report.laws_with_relevant_paper;

        total_predictions += static_cast<long>(law.rubric.predictions.size());
        for (const auto& pred : law.rubric.predictions) {
            bool evidenced = std::any_of(law.judgments.begin(), law.judgments.end(),
                                         [&](const EvidenceJudgment& j) {
                                             return j.prediction_short_name == pred.short_name &&
                                                    j.verdict != Verdict::no_evidence;
                                         });
            if (evidenced) ++evidenced_predictions;
        }

        auto precision = law_precision(law.rubric, law.judgments);
        report.per_law_precision[law.law_id] = precision;
        if (precision) {
            precision_sum += *precision;
            ++precision_n;
        }
    }

    report.unique_papers_with_relevant_experiments =
        static_cast<long>(global_relevant_papers.size());
    if (!laws.empty()) {
        report.law_recall = static_cast<double>(report.laws_with_relevant_paper) /
                            static_cast<double>(laws.size());
    }
    if (total_predictions > 0) {
        report.prediction_recall =
            static_cast<double>(evidenced_predictions) / static_cast<double>(total_predictions);
    }
    if (report.laws_with_relevant_paper > 0) {
        report.avg_papers_per_law_with_evidence =
            static_cast<double>(report.papers_with_relevant_experiments) /
            static_cast<double>(report.laws_with_relevant_paper);
    }
    if (precision_n > 0) {
        report.mean_law_precision = precision_sum / static_cast<double>(precision_n);
    }
    return report;
}

}  // namespace theorygen
