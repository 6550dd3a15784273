#include "theorygen/harness/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "theorygen/core/log.hpp"
#include "theorygen/core/rng.hpp"
#include "theorygen/extraction/extraction.hpp"
#include "theorygen/gateway/mock.hpp"

namespace theorygen {

namespace {

class StageTimer {
public:
    StageTimer(const RunDirectory& run, std::string stage)
        : run_(run), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        run_.append_timing(stage_, seconds);
    }

private:
    const RunDirectory& run_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

std::string ledger_prefix(const RunDirectory& run) {
    return run.exists("ledger.jsonl") ? run.read_text("ledger.jsonl") : std::string{};
}

void save_combined_ledger(const RunDirectory& run, const std::string& prefix,
                          const CostLedger& session) {
    run.write_text("ledger.jsonl", prefix + session.to_jsonl());
}

std::uint64_t next_record_number(const RunDirectory& run) {
    std::uint64_t next = 1;
    namespace fs = std::filesystem;
    fs::path dir = run.path("extractions");
    if (fs::exists(dir)) {
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string name = entry.path().filename().string();  // e<N>.<k>.json
            if (name.size() < 6 || name[0] != 'e') continue;
            std::size_t dot = name.find('.');
            if (dot == std::string::npos) continue;
            try {
                next = std::max<std::uint64_t>(next, std::stoull(name.substr(1, dot - 1)) + 1);
            } catch (...) {
            }
        }
    }
    return next;
}

std::uint64_t next_theory_number(const RunDirectory& run) {
    std::uint64_t next = 1;
    for (const auto& name : run.list_files("theories")) {
        if (name.rfind("theory-", 0) != 0) continue;
        try {
            next = std::max<std::uint64_t>(next, std::stoull(name.substr(7, name.find('.') - 7)) + 1);
        } catch (...) {
        }
    }
    return next;
}

}  // namespace

std::unique_ptr<Gateway> make_gateway(const RunConfig& config, const RunDirectory& run) {
    GatewayConfig gcfg = config.gateway_config(run.path("cache"));
    std::unique_ptr<Provider> provider;
    if (config.gateway_mode == GatewayMode::mock) {
        MockIndex index;
        if (!config.mock_corpus_file.empty()) index = MockIndex::load(config.mock_corpus_file);
        MockScript script;
        if (!config.mock_script_file.empty()) script = MockScript::load(config.mock_script_file);
        MockOptions options;
        options.seed = config.seed;
        options.default_theories_per_call = config.theories_per_query;
        provider = std::make_unique<MockProvider>(std::move(index), std::move(script), options);
    } else {
        provider = std::make_unique<HttpProvider>(config.http);
    }
    return std::make_unique<Gateway>(std::move(gcfg), std::move(provider));
}

void persist_corpus(const RunDirectory& run, const Corpus& corpus) {
    std::string base = "corpus/" + corpus.query_id;
    json manifest;
    manifest["query_id"] = corpus.query_id;
    manifest["target_size"] = corpus.target_size;
    manifest["empty_warning"] = corpus.empty_warning;
    json notes = json::array();
    for (const auto& n : corpus.retrieval_notes) notes.push_back(n.to_json());
    manifest["retrieval_notes"] = notes;
    json order = json::array();
    for (const auto& p : corpus.papers) order.push_back(p.paper_id);
    manifest["paper_order"] = order;
    for (const auto& p : corpus.papers) {
        run.write_json(base + "/papers/" + p.paper_id + ".json", p.to_json());
    }
    run.write_json(base + "/manifest.json", manifest);
}

Corpus load_corpus(const RunDirectory& run, const std::string& query_id) {
    std::string base = "corpus/" + query_id;
    json manifest = run.read_json(base + "/manifest.json");
    Corpus corpus;
    corpus.query_id = manifest["query_id"].get<std::string>();
    corpus.target_size = manifest["target_size"].get<int>();
    corpus.empty_warning = manifest.value("empty_warning", false);
    for (const auto& n : manifest["retrieval_notes"]) {
        corpus.retrieval_notes.push_back(ProvenanceNote::from_json(n));
    }
    for (const auto& pid : manifest["paper_order"]) {
        corpus.papers.push_back(PaperRecord::from_json(
            run.read_json(base + "/papers/" + pid.get<std::string>() + ".json")));
    }
    corpus.validate();
    return corpus;
}

std::vector<TheoryQuery> load_queries(const RunDirectory& run) {
    std::vector<TheoryQuery> queries;
    for (const auto& name : run.list_files("queries")) {
        queries.push_back(TheoryQuery::from_json(run.read_json("queries/" + name)));
    }
    std::sort(queries.begin(), queries.end(),
              [](const TheoryQuery& a, const TheoryQuery& b) { return a.id < b.id; });
    return queries;
}

std::vector<ExtractionRecord> load_extraction_records(const RunDirectory& run,
                                                      const std::string& query_id) {
    std::vector<ExtractionRecord> records;
    for (const auto& name : run.list_files("extractions/" + query_id)) {
        records.push_back(
            ExtractionRecord::from_json(run.read_json("extractions/" + query_id + "/" + name)));
    }
    std::sort(records.begin(), records.end(),
              [](const ExtractionRecord& a, const ExtractionRecord& b) { return a.uuid < b.uuid; });
    return records;
}

std::vector<ExtractionRecord> load_all_extraction_records(const RunDirectory& run) {
    std::vector<ExtractionRecord> records;
    namespace fs = std::filesystem;
    fs::path dir = run.path("extractions");
    if (fs::exists(dir)) {
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string rel = fs::relative(entry.path(), run.root()).generic_string();
            records.push_back(ExtractionRecord::from_json(run.read_json(rel)));
        }
    }
    std::sort(records.begin(), records.end(),
              [](const ExtractionRecord& a, const ExtractionRecord& b) { return a.uuid < b.uuid; });
    return records;
}

std::vector<Theory> load_theories(const RunDirectory& run) {
    std::vector<Theory> theories;
    for (const auto& name : run.list_files("theories")) {
        if (name.rfind("theory-", 0) != 0) continue;
        theories.push_back(Theory::from_json(run.read_json("theories/" + name)));
    }
    std::sort(theories.begin(), theories.end(),
              [](const Theory& a, const Theory& b) { return a.id < b.id; });
    return theories;
}

std::vector<KeptLaw> load_kept_laws(const RunDirectory& run) {
    json summary = run.read_json("quarantine/summary.json");
    std::set<std::string> kept_ids;
    for (const auto& [label, block] : summary["conditions"].items()) {
        (void)label;
        for (const auto& id : block["kept"]) kept_ids.insert(id.get<std::string>());
    }
    std::vector<KeptLaw> out;
    for (const auto& theory : load_theories(run)) {
        for (std::size_t i = 0; i < theory.laws.size(); ++i) {
            std::string law_id = make_law_id(theory.id, i);
            if (!kept_ids.count(law_id)) continue;
            KeptLaw kept;
            kept.ref = LawRef{theory.id, i, theory.condition, theory.laws[i]};
            kept.query_id = theory.provenance.query_id;
            kept.theory_description = theory.description;
            out.push_back(std::move(kept));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const KeptLaw& a, const KeptLaw& b) { return a.ref.law_id() < b.ref.law_id(); });
    return out;
}

TheorizeSummary run_theorize(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                             const TheorizeOptions& options) {
    if (options.queries.empty()) throw StageError("harness", "theorize needs at least one query");
    auto lock = run.acquire_lock();
    run.ensure_layout();

    std::string ledger_base = ledger_prefix(run);
    auto checkpoint_ledger = [&] { save_combined_ledger(run, ledger_base, gateway.ledger()); };

    // manifest is written before any stage executes
    if (!run.stage_complete("manifest")) {
        RunManifest manifest;
        manifest.run_id = options.run_id.empty()
                              ? "run-" + config.digest().substr(0, 12) + "-s" +
                                    std::to_string(config.seed)
                              : options.run_id;
        manifest.random_seed = config.seed;
        for (const char* stage :
             {"discovery", "extraction", "synthesis-parametric", "synthesis-literature",
              "reflection-parametric", "reflection-literature", "judge", "backtest-rubric",
              "backtest-judge", "self-belief", "novelty-per-paper", "novelty-consolidate",
              "overlap", "query-gen"}) {
            manifest.models[stage] = gateway.model_for(stage);
        }
        manifest.knowledge_window = config.window;
        manifest.config_digest = config.digest();
        run.write_json("config.json", config.to_json());
        run.write_json("manifest.json", manifest.to_json());
        run.mark_stage_complete("manifest", json{{"run_id", manifest.run_id}});
    } else {
        RunManifest manifest = RunManifest::from_json(run.read_json("manifest.json"));
        if (manifest.config_digest != config.digest()) {
            throw StageError("harness",
                             "run was created with a different configuration; refusing to resume");
        }
    }
    RunManifest manifest = RunManifest::from_json(run.read_json("manifest.json"));

    if (!run.stage_complete("queries")) {
        for (const auto& q : options.queries) {
            q.validate();
            run.write_json("queries/" + q.id + ".json", q.to_json());
        }
        run.mark_stage_complete("queries", json{{"count", options.queries.size()}});
    }
    std::vector<TheoryQuery> queries = load_queries(run);

    for (const auto& query : queries) {
        std::string stage = "discovery-" + query.id;
        if (run.stage_complete(stage)) continue;
        StageTimer timer(run, stage);
        std::string search_query = reformulate_query(gateway, query);
        RetrievalPlan plan;
        plan.search_query = search_query;
        plan.target_size = config.corpus_target_size;
        plan.date_filter = config.window.generation_range();
        Corpus corpus = discover_corpus(gateway, plan, query.id);
        persist_corpus(run, corpus);
        run.mark_stage_complete(stage, json{{"search_query", search_query},
                                            {"papers", corpus.papers.size()}});
        checkpoint_ledger();
    }

    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto& query = queries[qi];
        std::string stage = "extraction-" + query.id;
        if (run.stage_complete(stage)) continue;
        StageTimer timer(run, stage);
        ExtractionSchema schema =
            generate_schema(gateway, query, "extraction-schema-" + std::to_string(qi + 1));
        // the schema is persisted before extraction begins
        run.write_json("schemas/" + query.id + ".json", schema.to_json());

        Corpus corpus = load_corpus(run, query.id);
        RecordNumberAllocator allocator(next_record_number(run));
        ExtractionOptions ex_options;
        ex_options.chunk_chars = config.extraction_chunk_chars;
        long record_count = 0;
        for (const auto& paper : corpus.papers) {
            auto records = extract_evidence(gateway, paper, schema, allocator, ex_options);
            for (const auto& rec : records) {
                run.write_json("extractions/" + query.id + "/" + rec.uuid.to_string() + ".json",
                               rec.to_json());
                ++record_count;
            }
        }
        run.mark_stage_complete(stage, json{{"schema_digest", json_digest(schema.to_json())},
                                            {"records", record_count}});
        checkpoint_ledger();
    }

    for (const auto& query : queries) {
        for (const auto& condition : options.conditions) {
            std::string stage = "synthesis-" + query.id + "-" + condition.label();
            if (run.stage_complete(stage)) continue;
            StageTimer timer(run, stage);

            std::vector<ExtractionRecord> records;
            if (condition.knowledge == KnowledgeSource::literature) {
                records = load_extraction_records(run, query.id);
                if (records.empty()) {
                    Corpus corpus = load_corpus(run, query.id);
                    if (corpus.empty_warning) {
                        throw StageError(stage,
                                         "no literature evidence available and the condition "
                                         "requires it");
                    }
                }
            }
            EvidenceBundle bundle = assemble_evidence(
                records, config.evidence_token_budget,
                derive_seed(config.seed, "bundle-" + query.id + "-" + condition.label()));

            SynthesisOptions syn;
            syn.theories_per_query = config.theories_per_query;
            syn.generation_seed = config.seed;
            TheoryIdAllocator ids(next_theory_number(run));
            auto theories = synthesize_theories(gateway, query, bundle, condition, syn, ids);
            json theory_ids = json::array();
            for (auto& theory : theories) {
                Theory reflected = reflect(gateway, theory, bundle.uuid_set());
                run.write_json("theories/" + reflected.id + ".json", reflected.to_json());
                theory_ids.push_back(reflected.id);
            }
            run.mark_stage_complete(stage, json{{"theories", theory_ids},
                                                {"bundle_digest", bundle.digest}});
            checkpoint_ledger();
        }
    }

    if (!run.stage_complete("filter")) {
        StageTimer timer(run, "filter");
        std::vector<Theory> theories = load_theories(run);
        json summary;
        json by_condition = json::object();
        for (const auto& condition : all_conditions()) {
            std::vector<Theory> of_condition;
            for (const auto& t : theories) {
                if (t.condition == condition) of_condition.push_back(t);
            }
            if (of_condition.empty()) continue;
            auto result = filter_laws_by_self_novelty(of_condition);
            json kept = json::array();
            for (const auto& law : result.kept) kept.push_back(law.law_id());
            json filtered = json::array();
            for (const auto& law : result.filtered) {
                filtered.push_back(law.law_id());
                json quarantined = law.law.to_json();
                quarantined["law_id"] = law.law_id();
                quarantined["condition"] = condition.to_json();
                run.write_json("quarantine/" + law.law_id() + ".json", quarantined);
            }
            by_condition[condition.label()] =
                json{{"kept", kept},
                     {"filtered", filtered},
                     {"filtered_fraction", result.filtered_fraction}};
        }
        summary["conditions"] = by_condition;
        run.write_json("quarantine/summary.json", summary);
        run.mark_stage_complete("filter", json::object());
        checkpoint_ledger();
    }

    TheorizeSummary summary;
    summary.run_id = manifest.run_id;
    long filtered = 0, total_laws = 0;
    for (const auto& theory : load_theories(run)) {
        summary.theories_per_condition[theory.condition.label()] += 1;
        summary.total_theories += 1;
        total_laws += static_cast<long>(theory.laws.size());
    }
    json qsummary = run.read_json("quarantine/summary.json");
    for (const auto& [label, block] : qsummary["conditions"].items()) {
        (void)label;
        filtered += static_cast<long>(block["filtered"].size());
    }
    summary.filtered_fraction =
        total_laws > 0 ? static_cast<double>(filtered) / static_cast<double>(total_laws) : 0.0;
    return summary;
}

}  // namespace theorygen
