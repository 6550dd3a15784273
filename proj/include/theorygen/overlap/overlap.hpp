#pragma once

#include <functional>
#include <mutex>

#include "theorygen/gateway/gateway.hpp"
#include "theorygen/synthesis/synthesis.hpp"

namespace theorygen {

enum class SimilarityTag { essential, non_essential };
std::string_view to_string(SimilarityTag t);
SimilarityTag parse_similarity_tag(const std::string& s);

struct TaggedStatement {
    std::string text;
    SimilarityTag tag = SimilarityTag::non_essential;

    json to_json() const;
    static TaggedStatement from_json(const json& j);
};

enum class DuplicateVerdict { duplicates, not_duplicates };
std::string_view to_string(DuplicateVerdict v);
DuplicateVerdict parse_duplicate_verdict(const std::string& s);

struct DuplicateJudgment {
    std::string law_a_id;
    std::string law_b_id;
    std::string core_claim_a;
    std::string core_claim_b;
    std::vector<TaggedStatement> similarities;
    std::vector<TaggedStatement> differences;
    std::string reasoning;
    DuplicateVerdict verdict = DuplicateVerdict::not_duplicates;
    std::optional<std::string> audit_flag;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static DuplicateJudgment from_json(const json& j);
};

/// Pairwise duplicate judging. Prompt order is fixed by law id, so the result
/// is independent of argument order; a contract violation yields
/// not_duplicates with the audit flag set.
DuplicateJudgment judge_duplicate(Gateway& gateway, const LawRef& a, const LawRef& b);

/// Judgment cache keyed by the unordered law-id pair, shared across Monte
/// Carlo trials. Reads concurrent, writes serialized.
class PairJudgmentCache {
public:
    const DuplicateJudgment* find(const std::string& id_a, const std::string& id_b) const;
    void insert(DuplicateJudgment judgment);

    std::vector<DuplicateJudgment> all() const;
    std::size_t size() const;

    static std::string pair_key(const std::string& id_a, const std::string& id_b);

private:
    mutable std::mutex mutex_;
    std::map<std::string, DuplicateJudgment> judgments_;
};

enum class OverlapSeries { within_parametric, within_literature, across };
std::string_view to_string(OverlapSeries s);

struct OverlapPoint {
    int sample_size = 0;  // N
    double mean = 0.0;    // duplicate proportion over the trials
    double stddev = 0.0;  // sample standard deviation across the trials
    bool capped = false;  // N exceeded the candidate pool and was capped
};

struct OverlapCurve {
    OverlapSeries series = OverlapSeries::within_parametric;
    std::vector<OverlapPoint> points;  // ordered by N
    int samples_per_point = 50;
    long comparisons = 0;  // total law-law comparisons across trials (cache hits included)

    json to_json() const;
};

/// Duplicate test used by the Monte Carlo driver; production adapts
/// judge_duplicate + cache, tests can plug an equality oracle.
using DuplicateFn = std::function<bool(const LawRef&, const LawRef&)>;

/// Monte Carlo saturation analysis. A trial draws one probe law from pool_a
/// and N laws from pool_b (without replacement, the probe excluded from its
/// own sample in within-series mode), succeeding when any pairwise judgment
/// says duplicates. Each point reports mean and standard deviation over
/// samples_per_point trials. N larger than the candidate pool is capped and
/// recorded.
OverlapCurve monte_carlo_curve(const std::vector<LawRef>& pool_a,
                               const std::vector<LawRef>& pool_b, bool within_series,
                               const std::vector<int>& n_values, int samples_per_point,
                               std::uint64_t seed, const DuplicateFn& is_duplicate,
                               OverlapSeries series_label);

/// Production DuplicateFn: pairwise gateway judgments behind the shared cache.
DuplicateFn gateway_duplicate_fn(Gateway& gateway, PairJudgmentCache& cache);

}  // namespace theorygen
