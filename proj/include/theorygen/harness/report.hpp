#pragma once

#include "theorygen/harness/pipeline.hpp"

namespace theorygen {

struct ReportSummary {
    std::string run_digest;
    int theory_pages = 0;
};

/// Emits the static HTML bundle plus a machine-readable summary under
/// reports/. Every number is recomputed from persisted records; the report
/// carries no state of its own. Requires at least one completed evaluation
/// suite. The run digest in summary.json is computed over the run contents
/// before any report file is written.
ReportSummary emit_report(const RunDirectory& run, const RunConfig& config);

}  // namespace theorygen
