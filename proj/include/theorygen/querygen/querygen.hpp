#pragma once

#include "theorygen/gateway/gateway.hpp"

namespace theorygen {

struct QueryPair {
    TheoryQuery general;   // kind = general
    TheoryQuery specific;  // kind = specific
    std::string source_paper_id;

    void validate() const;
    json to_json() const;
    static QueryPair from_json(const json& j);
};

/// Generates one general and one specific theory query targeting the paper's
/// central research theme. Both queries must begin with "Build a theory of";
/// a violating response (after the contract reprompt) raises
/// ContractViolation and the caller skips the paper, counting it.
QueryPair generate_queries(Gateway& gateway, const PaperRecord& paper,
                           const std::string& query_id_prefix);

/// Seed papers must be published within the 12 months before the model
/// cutoff. Returns the papers passing the filter, preserving order.
std::vector<PaperRecord> filter_seed_papers(const std::vector<PaperRecord>& papers,
                                            const Date& model_cutoff);

}  // namespace theorygen
