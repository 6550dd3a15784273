#pragma once

#include <map>
#include <string>
#include <vector>

#include "theorygen/gateway/types.hpp"

namespace theorygen {

/// Versioned prompt templates with {{placeholder}} substitution. Templates are
/// compiled in; the asset id (e.g. "synthesize-theories@v1") is part of every
/// request key, so editing a template under a new version never collides with
/// cached or scripted responses for the old one.
class PromptLibrary {
public:
    PromptLibrary();

    bool has(const std::string& asset_id) const;
    const std::string& text(const std::string& asset_id) const;

    /// Substitutes {{name}} with variables[name]. Throws ValidationError when a
    /// placeholder is unbound (before any network activity). Unused variables
    /// are fine; callers attach metadata like sample indices through them.
    std::string render(const ChatRequest& request) const;

    std::vector<std::string> asset_ids() const;

private:
    std::map<std::string, std::string> templates_;
};

namespace prompt_assets {

inline constexpr const char* reformulate_query = "reformulate-query@v1";
inline constexpr const char* generate_schema = "generate-schema@v1";
inline constexpr const char* extract_evidence = "extract-evidence@v1";
inline constexpr const char* merge_extractions = "merge-extractions@v1";
inline constexpr const char* mine_references = "mine-references@v1";
inline constexpr const char* synthesize_theories = "synthesize-theories@v1";
inline constexpr const char* reflect_theory = "reflect-theory@v1";
inline constexpr const char* judge_law = "judge-law@v1";
inline constexpr const char* generate_rubric = "generate-rubric@v1";
inline constexpr const char* judge_evidence = "judge-evidence@v1";
inline constexpr const char* self_belief_vote = "self-belief-vote@v1";
inline constexpr const char* novelty_per_paper = "novelty-per-paper@v1";
inline constexpr const char* novelty_consolidate = "novelty-consolidate@v1";
inline constexpr const char* judge_duplicate = "judge-duplicate@v1";
inline constexpr const char* generate_queries = "generate-queries@v1";

}  // namespace prompt_assets

}  // namespace theorygen
