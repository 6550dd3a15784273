#pragma once

#include <string>
#include <vector>

#include "theorygen/core/types.hpp"

namespace theorygen {

/// One unresolvable (or ambiguous) evidence link. Violations are data for the
/// caller, not failures.
struct EvidenceLinkViolation {
    std::string law_id;
    EvidenceUuid uuid;
    enum class Reason { dangling, ambiguous } reason = Reason::dangling;

    std::string describe() const;
};

/// Checks that every evidence UUID cited by every law resolves to exactly one
/// record among `available_uuids` (the UUIDs of the extraction records in
/// scope). Duplicate entries in `available_uuids` make a citation ambiguous.
/// A theory citing UUIDs from outside its own corpus is reported by the
/// caller's choice of `available_uuids`, never forbidden here.
std::vector<EvidenceLinkViolation> validate_evidence_links(
    const Theory& theory, const std::vector<EvidenceUuid>& available_uuids);

}  // namespace theorygen
