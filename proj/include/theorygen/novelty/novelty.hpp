#pragma once

#include <set>

#include "theorygen/gateway/gateway.hpp"
#include "theorygen/synthesis/synthesis.hpp"

namespace theorygen {

/// The seven dimensions along which a law can be novel relative to its
/// reference corpus.
enum class NoveltyDimension {
    phenomenon_effect,
    explanation,
    unification,
    generalization_scope_expansion,
    limitation_scope_constraint,
    conceptual_reframing_abstraction,
    empirical_synthesis_meta_regularity,
};

std::string_view to_string(NoveltyDimension d);
NoveltyDimension parse_novelty_dimension(const std::string& s);
const std::vector<NoveltyDimension>& all_novelty_dimensions();  // exactly seven

/// Ordered most novel (0) to least novel (3).
enum class NoveltyDegree {
    genuinely_new = 0,
    derivable_unstated = 1,
    explicit_peripheral = 2,
    explicit_established = 3,
};

std::string_view to_string(NoveltyDegree d);
NoveltyDegree parse_novelty_degree(const std::string& s);
int degree_ordinal(NoveltyDegree d);

/// Consolidated degrees that count as "novel" in the proportion table.
/// The binary mapping is configuration; this is the default.
const std::set<NoveltyDegree>& default_novel_degrees();

struct PerPaperNovelty {
    std::string law_id;
    std::string paper_id;
    NoveltyDimension dimension = NoveltyDimension::phenomenon_effect;
    NoveltyDegree degree = NoveltyDegree::explicit_established;
    std::string rationale;
    std::optional<std::string> audit_flag;
    json extra = json::object();

    json to_json() const;
    static PerPaperNovelty from_json(const json& j);
};

struct ConsolidatedNovelty {
    std::string law_id;
    NoveltyDimension dimension = NoveltyDimension::phenomenon_effect;
    std::string what_is_known;
    std::string what_introduced;
    std::string what_novel;
    NoveltyDegree degree = NoveltyDegree::explicit_established;
    bool novel_flag = false;
    /// Paper ids in the order the assessments were fed to the consolidating
    /// call (descending novelty); kept for audit.
    std::vector<std::string> input_paper_order;
    json extra = json::object();

    void validate(const std::set<NoveltyDegree>& novel_degrees) const;
    json to_json() const;
    static ConsolidatedNovelty from_json(const json& j);
};

/// One per-paper judge call for (law, paper, dimension). The paper must belong
/// to the reference corpus of the law's query. A contract violation is scored
/// explicit_established with the audit flag set (conservative against
/// novelty).
PerPaperNovelty judge_paper_novelty(Gateway& gateway, const LawRef& law, const PaperRecord& paper,
                                    NoveltyDimension dimension);

/// Sorts the per-paper assessments by descending novelty — ascending
/// (degree ordinal, paper_id) — and issues the one consolidating call for this
/// dimension (7 per law across dimensions). Contract violations are stage
/// errors.
ConsolidatedNovelty consolidate(Gateway& gateway, const LawRef& law, NoveltyDimension dimension,
                                std::vector<PerPaperNovelty> assessments,
                                const std::set<NoveltyDegree>& novel_degrees);

/// The deterministic input order used by consolidate(), exposed for testing.
std::vector<PerPaperNovelty> sort_descending_novelty(std::vector<PerPaperNovelty> assessments);

struct LawNoveltyEvaluation {
    std::string law_id;
    GenerationCondition condition;
    std::vector<ConsolidatedNovelty> consolidated;  // one per dimension
};

struct NoveltyTable {
    /// condition label -> dimension -> proportion of sampled laws with
    /// novel_flag set.
    std::map<std::string, std::map<NoveltyDimension, double>> proportions;
    std::map<std::string, long> sample_sizes;

    json to_json() const;
};

NoveltyTable novelty_proportion_table(const std::vector<LawNoveltyEvaluation>& laws);

}  // namespace theorygen
