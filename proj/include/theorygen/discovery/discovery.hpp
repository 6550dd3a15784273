#pragma once

#include "theorygen/core/types.hpp"
#include "theorygen/gateway/gateway.hpp"

namespace theorygen {

struct RetrievalPlan {
    std::string search_query;
    int target_size = 100;  // K
    DateRange date_filter;  // supplement period for literature-supported generation

    void validate() const;
};

/// Candidate for backfill ranking: a paper plus its relevance score (provider
/// score when available, else lexical overlap with the search query).
struct ScoredCandidate {
    PaperRecord paper;
    double score = 0.0;
    bool provider_scored = false;
};

/// Turns a theory query into a literature search query via the gateway.
/// The result is recorded in the corpus retrieval notes downstream.
std::string reformulate_query(Gateway& gateway, const TheoryQuery& query);

/// Orders backfill candidates by (score desc, publication_date desc, paper_id
/// asc). Candidates must already be deduplicated against the corpus.
std::vector<ScoredCandidate> rank_backfill_candidates(std::vector<ScoredCandidate> candidates,
                                                      const std::string& search_query);

/// Builds a corpus of up to K papers: direct search hits first (provider
/// order), then one hop of reference backfill mined from retrieved full texts
/// when the direct search under-delivers. Dedup by paper_id; provenance per
/// paper. Zero papers found anywhere yields an empty corpus with its warning
/// flag set rather than an error.
Corpus discover_corpus(Gateway& gateway, const RetrievalPlan& plan, const std::string& query_id);

}  // namespace theorygen
