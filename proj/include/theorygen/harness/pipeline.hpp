#pragma once

#include <memory>

#include "theorygen/discovery/discovery.hpp"
#include "theorygen/harness/config.hpp"
#include "theorygen/harness/run_dir.hpp"
#include "theorygen/synthesis/synthesis.hpp"

namespace theorygen {

/// Builds the configured gateway (mock or http) with its cache inside the run
/// directory.
std::unique_ptr<Gateway> make_gateway(const RunConfig& config, const RunDirectory& run);

struct TheorizeOptions {
    std::vector<TheoryQuery> queries;
    std::vector<GenerationCondition> conditions = all_conditions();
    std::string run_id;  // empty -> derived from seed + config digest
};

struct TheorizeSummary {
    std::string run_id;
    std::map<std::string, int> theories_per_condition;
    int total_theories = 0;
    double filtered_fraction = 0.0;  // across conditions
};

/// Executes discovery -> extraction -> synthesis -> reflection -> filter for
/// every (query, condition), resumably: completed stages are skipped on rerun
/// (a completed run performs zero gateway calls). A stage failure halts with
/// the stage name; partial outputs stay on disk.
TheorizeSummary run_theorize(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                             const TheorizeOptions& options);

// ---------------------------------------------------------------------------
// persisted-record access shared by the evaluation and report stages

std::vector<TheoryQuery> load_queries(const RunDirectory& run);
Corpus load_corpus(const RunDirectory& run, const std::string& query_id);
std::vector<ExtractionRecord> load_extraction_records(const RunDirectory& run,
                                                      const std::string& query_id);
std::vector<ExtractionRecord> load_all_extraction_records(const RunDirectory& run);
std::vector<Theory> load_theories(const RunDirectory& run);

struct KeptLaw {
    LawRef ref;
    std::string query_id;
    std::string theory_description;
};

/// Laws that survived the self-novelty filter, in stable law-id order.
std::vector<KeptLaw> load_kept_laws(const RunDirectory& run);

void persist_corpus(const RunDirectory& run, const Corpus& corpus);

}  // namespace theorygen
