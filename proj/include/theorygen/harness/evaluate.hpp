#pragma once

#include <set>

#include "theorygen/harness/pipeline.hpp"

namespace theorygen {

inline const std::set<std::string>& all_eval_suites() {
    static const std::set<std::string> suites = {"judge", "backtest", "novelty", "overlap"};
    return suites;
}

struct EvaluateOptions {
    std::set<std::string> suites;  // subset of all_eval_suites(); empty -> no-op
};

struct EvaluateSummary {
    std::set<std::string> ran;
    std::set<std::string> skipped_complete;
};

/// Runs the requested evaluation suites over the run's kept laws. Each suite
/// persists its records under evals/<suite>/ plus a machine-readable report
/// section; per-law failures are isolated and counted, never aborting the
/// suite. Completed suites are skipped on rerun.
EvaluateSummary run_evaluate(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                             const EvaluateOptions& options);

}  // namespace theorygen
