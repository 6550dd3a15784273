#pragma once

#include "theorygen/gateway/gateway.hpp"
#include "theorygen/synthesis/synthesis.hpp"

namespace theorygen {

/// One empirical prediction of a law, used as a grading rubric item. The
/// strong test requirement pins what a paper must report to count as a valid
/// test; support/contradiction criteria keep marginally related results from
/// being read as evidence.
struct Prediction {
    std::string short_name;
    std::string specific_prediction;
    std::vector<std::string> operational_signals;
    std::string strong_test_requirement;
    std::string support_criteria;
    std::string contradiction_criteria;
    json extra = json::object();

    void validate() const;  // all five content fields non-empty
    json to_json() const;
    static Prediction from_json(const json& j);
};

struct PredictionRubric {
    std::string law_id;
    std::vector<Prediction> predictions;  // short_names unique; target ~5
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static PredictionRubric from_json(const json& j);
};

enum class Verdict { support, contradict, no_evidence };
std::string_view to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct EvidenceJudgment {
    std::string law_id;
    std::string prediction_short_name;
    std::string paper_id;
    Verdict verdict = Verdict::no_evidence;
    std::string evidence_locator;  // required for support/contradict
    std::string rationale;
    std::optional<std::string> audit_flag;  // set when a contract violation was coerced
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static EvidenceJudgment from_json(const json& j);
};

/// Generates the per-law prediction rubric. Throws ContractViolation when the
/// model cannot produce a valid rubric after the reprompt; the caller excludes
/// the law and counts it.
PredictionRubric generate_rubric(Gateway& gateway, const LawRef& law);

/// Recent papers whose results may speak to the rubric: one search per
/// prediction plus one per law, unioned and deduplicated, all within the
/// holdout window (supplement_end, holdout_end]. Deterministic order:
/// (publication_date asc, paper_id asc).
std::vector<PaperRecord> find_evaluation_papers(Gateway& gateway, const PredictionRubric& rubric,
                                                const std::string& law_statement,
                                                const KnowledgeWindow& window,
                                                int per_search_cap);

/// Judges one paper against one prediction. A paper without obtainable full
/// text yields no_evidence (keeps denominators stable); a contract violation
/// yields no_evidence with the audit flag set.
EvidenceJudgment judge_evidence(Gateway& gateway, const PaperRecord& paper,
                                const Prediction& prediction, const std::string& law_id);

/// C_supp / (C_supp + C_cont); nullopt marks "no evidence found" (denominator
/// zero). Never coerced to 0.
std::optional<double> prediction_precision(const std::vector<EvidenceJudgment>& judgments);

/// Mean precision over the rubric's predictions, excluding predictions with
/// no evidence; nullopt when every prediction lacks evidence.
std::optional<double> law_precision(const PredictionRubric& rubric,
                                    const std::vector<EvidenceJudgment>& judgments);

struct LawJudgments {
    std::string law_id;
    PredictionRubric rubric;
    std::vector<EvidenceJudgment> judgments;
};

struct PrecisionRecallReport {
    std::map<std::string, std::optional<double>> per_law_precision;
    std::optional<double> mean_law_precision;  // over laws with evidence
    double law_recall = 0.0;
    double prediction_recall = 0.0;

    long law_paper_evaluations = 0;           // (law, paper) pairs judged
    long papers_with_relevant_experiments = 0;  // per-law counting (a paper counts
                                                // once per law it informs)
    long unique_papers_with_relevant_experiments = 0;  // global dedup across laws
    long laws_with_relevant_paper = 0;
    std::optional<double> avg_papers_per_law_with_evidence;

    json to_json() const;
};

/// Precision/recall over all evaluated laws. Pure fold in stable law order.
PrecisionRecallReport compute_recall(const std::vector<LawJudgments>& laws);

}  // namespace theorygen
