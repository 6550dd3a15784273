#include "theorygen/core/validate.hpp"

#include <map>

namespace theorygen {

std::string EvidenceLinkViolation::describe() const {
    return law_id + " cites " + uuid.to_string() +
           (reason == Reason::dangling ? " which resolves to no extraction record"
                                       : " which resolves to more than one extraction record");
}

std::vector<EvidenceLinkViolation> validate_evidence_links(
    const Theory& theory, const std::vector<EvidenceUuid>& available_uuids) {
    std::map<EvidenceUuid, int> counts;
    for (const auto& u : available_uuids) counts[u]++;

    std::vector<EvidenceLinkViolation> violations;
    for (std::size_t i = 0; i < theory.laws.size(); ++i) {
        for (const auto& u : theory.laws[i].all_uuids()) {
            auto it = counts.find(u);
            if (it == counts.end()) {
                violations.push_back({make_law_id(theory.id, i), u,
                                      EvidenceLinkViolation::Reason::dangling});
            } else if (it->second > 1) {
                violations.push_back({make_law_id(theory.id, i), u,
                                      EvidenceLinkViolation::Reason::ambiguous});
            }
        }
    }
    return violations;
}

}  // namespace theorygen
