#pragma once

#include <set>

#include "theorygen/extraction/extraction.hpp"
#include "theorygen/gateway/gateway.hpp"

namespace theorygen {

/// Evidence selected for one synthesis call, in stable record order.
struct EvidenceBundle {
    std::vector<ExtractionRecord> records;
    long token_estimate = 0;
    std::optional<std::uint64_t> subsample_seed;  // set iff subsampling happened
    std::string digest;

    std::set<EvidenceUuid> uuid_set() const;
    /// Rendered records as fed to the synthesis prompt.
    std::string render_text() const;
};

/// Keeps all relevant records when their token estimate fits the budget;
/// otherwise takes a uniform random subset under the seed, preserving the
/// original record order. Subset algorithm (replayed by the test oracle):
/// Fisher-Yates-shuffle the record indices with Rng(derive_seed(seed,
/// "evidence-subsample")), walk the shuffled order adding every record whose
/// token estimate still fits the remaining budget, then restore original
/// order. Records flagged relevant=false never reach synthesis.
EvidenceBundle assemble_evidence(const std::vector<ExtractionRecord>& records, long token_budget,
                                 std::uint64_t seed);

class TheoryIdAllocator {
public:
    explicit TheoryIdAllocator(std::uint64_t first = 1) : next_(first) {}
    std::string next() { return "theory-" + std::to_string(next_.fetch_add(1)); }

private:
    std::atomic<std::uint64_t> next_;
};

struct SynthesisOptions {
    int theories_per_query = 8;
    std::uint64_t generation_seed = 0;
};

/// Induces candidate theories grounded in the bundle (or in parametric
/// knowledge alone when the bundle is empty). Temperature is 0 for the
/// accuracy objective and 1 for the novelty objective. The literature
/// condition requires a non-empty bundle and the parametric condition an
/// empty one.
std::vector<Theory> synthesize_theories(Gateway& gateway, const TheoryQuery& query,
                                        const EvidenceBundle& bundle,
                                        const GenerationCondition& condition,
                                        const SynthesisOptions& options,
                                        TheoryIdAllocator& ids);

/// One self-reflection pass, applied independently per theory. The reflected
/// theory must keep all Theory invariants and cite only uuids available in the
/// bundle; otherwise the pre-reflection theory is kept and a warning logged.
Theory reflect(Gateway& gateway, const Theory& theory, const std::set<EvidenceUuid>& bundle_uuids);

struct LawRef {
    std::string theory_id;
    std::size_t law_index = 0;
    GenerationCondition condition;
    Law law;

    std::string law_id() const { return make_law_id(theory_id, law_index); }
};

struct SelfNoveltyFilterResult {
    std::vector<LawRef> kept;
    std::vector<LawRef> filtered;
    double filtered_fraction = 0.0;  // filtered / (kept + filtered)
};

/// Removes laws self-classified closely-related-to-existing or existing.
SelfNoveltyFilterResult filter_laws_by_self_novelty(const std::vector<Theory>& theories);

}  // namespace theorygen
