#include "theorygen/judge/judge.hpp"

#include <cmath>

namespace theorygen {

std::string_view to_string(JudgeDimension d) {
    switch (d) {
        case JudgeDimension::specificity: return "specificity";
        case JudgeDimension::empirical_support: return "empirical_support";
        case JudgeDimension::novelty: return "novelty";
        case JudgeDimension::plausibility: return "plausibility";
    }
    return "specificity";
}

JudgeDimension parse_judge_dimension(const std::string& s) {
    if (s == "specificity") return JudgeDimension::specificity;
    if (s == "empirical_support") return JudgeDimension::empirical_support;
    if (s == "novelty") return JudgeDimension::novelty;
    if (s == "plausibility") return JudgeDimension::plausibility;
    throw ValidationError("unknown judge dimension: '" + s + "'");
}

const std::vector<JudgeDimension>& all_judge_dimensions() {
    static const std::vector<JudgeDimension> dims = {
        JudgeDimension::specificity, JudgeDimension::empirical_support, JudgeDimension::novelty,
        JudgeDimension::plausibility};
    return dims;
}

void JudgeScore::validate() const {
    if (score < 1 || score > 10) {
        throw ValidationError("judge score must lie in [1, 10], got " + std::to_string(score));
    }
    if (law_id.empty()) throw ValidationError("judge score needs a law id");
}

json JudgeScore::to_json() const {
    json j = extra;
    j["law_id"] = law_id;
    j["dimension"] = std::string(to_string(dimension));
    j["score"] = score;
    j["rationale"] = rationale;
    j["judge_model_id"] = judge_model_id;
    return j;
}

JudgeScore JudgeScore::from_json(const json& j) {
    JsonReader r(j, "JudgeScore");
    JudgeScore s;
    s.law_id = r.require_string("law_id");
    s.dimension = parse_judge_dimension(r.require_string("dimension"));
    s.score = r.require("score").get<int>();
    s.rationale = r.string_or("rationale", "");
    s.judge_model_id = r.string_or("judge_model_id", "");
    s.extra = r.take_extra();
    s.validate();
    return s;
}

namespace {

ChatRequest judge_request(const LawRef& law, const std::string& theory_description,
                          JudgeDimension dimension) {
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::judge_law;
    request.variables["law_name"] = law.law.name;
    request.variables["law_statement"] = law.law.statement;
    request.variables["law_scope"] = law.law.scope;
    request.variables["theory_description"] = theory_description;
    request.variables["dimension"] = std::string(to_string(dimension));
    request.variables["law_id"] = law.law_id();
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"score", "rationale"};
    request.stage = "judge";
    return request;
}

std::optional<int> parse_score(const std::string& text) {
    json j = parse_json(text);
    if (!j["score"].is_number_integer()) return std::nullopt;
    int score = j["score"].get<int>();
    if (score < 1 || score > 10) return std::nullopt;
    return score;
}

}  // namespace

JudgeScore score_law(Gateway& gateway, const LawRef& law, const std::string& theory_description,
                     JudgeDimension dimension) {
    ChatRequest request = judge_request(law, theory_description, dimension);
    ChatResponse response = gateway.chat(request);
    std::optional<int> score = parse_score(response.text);
    if (!score) {
        // semantic range violation: one reprompt beyond the structural check
        ChatRequest retry = request;
        retry.variables["__range_retry"] = "1";
        response = gateway.chat(retry);
        score = parse_score(response.text);
        if (!score) {
            throw ContractViolation("judge returned an out-of-range score for " + law.law_id() +
                                    " on " + std::string(to_string(dimension)));
        }
    }
    JudgeScore s;
    s.law_id = law.law_id();
    s.dimension = dimension;
    s.score = *score;
    s.rationale = parse_json(response.text).value("rationale", "");
    s.judge_model_id = response.model_id;
    s.validate();
    return s;
}

std::optional<int> delta_percent(double parametric_mean, double literature_mean) {
    if (parametric_mean == 0.0) return std::nullopt;
    double rel = 100.0 * (literature_mean - parametric_mean) / parametric_mean;
    return static_cast<int>(std::lround(rel));
}

json ConditionTable::to_json() const {
    json j;
    json cells_j = json::object();
    for (const auto& [label, by_dim] : cells) {
        json row = json::object();
        for (const auto& [dim, cell] : by_dim) {
            row[std::string(to_string(dim))] = json{{"mean", cell.mean}, {"n", cell.n}};
        }
        cells_j[label] = row;
    }
    j["cells"] = cells_j;
    json deltas_j = json::object();
    for (const auto& [objective, by_dim] : deltas) {
        json row = json::object();
        for (const auto& [dim, delta] : by_dim) {
            row[std::string(to_string(dim))] = delta ? json(*delta) : json(nullptr);
        }
        deltas_j[objective] = row;
    }
    j["deltas"] = deltas_j;
    return j;
}

ConditionTable aggregate_condition_table(
    const std::vector<JudgeScore>& scores,
    const std::map<std::string, GenerationCondition>& condition_of_law) {
    std::map<std::string, std::map<JudgeDimension, std::pair<double, long>>> sums;
    for (const auto& s : scores) {
        auto it = condition_of_law.find(s.law_id);
        if (it == condition_of_law.end()) {
            throw ValidationError("score for unknown law '" + s.law_id + "'");
        }
        auto& [sum, n] = sums[it->second.label()][s.dimension];
        sum += s.score;
        n += 1;
    }

    ConditionTable table;
    for (const auto& [label, by_dim] : sums) {
        for (const auto& [dim, acc] : by_dim) {
            table.cells[label][dim] = {acc.first / static_cast<double>(acc.second), acc.second};
        }
    }

    for (Objective objective : {Objective::accuracy, Objective::novelty}) {
        GenerationCondition param{KnowledgeSource::parametric, objective};
        GenerationCondition lit{KnowledgeSource::literature, objective};
        auto pit = table.cells.find(param.label());
        auto lit_it = table.cells.find(lit.label());
        if (pit == table.cells.end() || lit_it == table.cells.end()) continue;
        for (const auto& [dim, pcell] : pit->second) {
            auto dit = lit_it->second.find(dim);
            if (dit == lit_it->second.end()) continue;
            table.deltas[std::string(to_string(objective))][dim] =
                delta_percent(pcell.mean, dit->second.mean);
        }
    }
    return table;
}

}  // namespace theorygen
