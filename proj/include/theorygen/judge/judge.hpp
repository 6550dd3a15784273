#pragma once

#include "theorygen/gateway/gateway.hpp"
#include "theorygen/synthesis/synthesis.hpp"

namespace theorygen {

enum class JudgeDimension { specificity, empirical_support, novelty, plausibility };

std::string_view to_string(JudgeDimension d);
JudgeDimension parse_judge_dimension(const std::string& s);
const std::vector<JudgeDimension>& all_judge_dimensions();

struct JudgeScore {
    std::string law_id;
    JudgeDimension dimension = JudgeDimension::specificity;
    int score = 1;  // 1..10 Likert
    std::string rationale;
    std::string judge_model_id;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static JudgeScore from_json(const json& j);
};

/// One judge call per (law, dimension). The law is presented with its parent
/// theory description for context. An out-of-range or malformed score is
/// reprompted once; a second violation throws ContractViolation and the
/// caller counts the law as unscored.
JudgeScore score_law(Gateway& gateway, const LawRef& law, const std::string& theory_description,
                     JudgeDimension dimension);

struct ConditionCell {
    double mean = 0.0;
    long n = 0;
};

/// Relative difference, percent, computed on unrounded means and rounded
/// half-away-from-zero for display: round(100 * (lit - param) / param).
/// Undefined (absent) when the parametric mean is 0.
std::optional<int> delta_percent(double parametric_mean, double literature_mean);

struct ConditionTable {
    /// (condition label, dimension) -> mean/n over scored laws.
    std::map<std::string, std::map<JudgeDimension, ConditionCell>> cells;
    /// (objective, dimension) -> delta percent literature vs parametric.
    std::map<std::string, std::map<JudgeDimension, std::optional<int>>> deltas;

    json to_json() const;
};

/// Aggregates scores into the per-condition table with relative deltas. Each
/// score must be attached to exactly one condition via its law_id.
ConditionTable aggregate_condition_table(
    const std::vector<JudgeScore>& scores,
    const std::map<std::string, GenerationCondition>& condition_of_law);

}  // namespace theorygen
