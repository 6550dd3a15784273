#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "theorygen/core/log.hpp"
#include "theorygen/gateway/mock.hpp"
#include "theorygen/harness/evaluate.hpp"
#include "theorygen/harness/report.hpp"
#include "theorygen/querygen/querygen.hpp"

namespace fs = std::filesystem;
using namespace theorygen;

namespace {

struct CommonFlags {
    std::string run_dir;
    std::string config_file;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool mock = false;
    std::string mock_corpus;
    std::string mock_script;
    std::string window_spec;  // cutoff:supplement_end:holdout_end
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_run = true) {
    if (needs_run) {
        cmd->add_option("--run", flags.run_dir, "Run directory")->required();
    }
    cmd->add_option("--config", flags.config_file, "Configuration file (JSON)");
    cmd->add_option("--seed", flags.seed, "Random seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_flag("--mock", flags.mock, "Use the deterministic mock gateway");
    cmd->add_option("--mock-corpus", flags.mock_corpus, "Mock paper index (JSON)");
    cmd->add_option("--mock-script", flags.mock_script, "Mock canned-response table (JSON)");
    cmd->add_option("--window", flags.window_spec,
                    "Knowledge window as cutoff:supplement_end:holdout_end");
    cmd->add_flag("-v,--verbose", flags.verbose, "Verbose logging");
}

RunConfig resolve_config(const CommonFlags& flags, const RunDirectory* run) {
    RunConfig config;
    if (!flags.config_file.empty()) {
        config = RunConfig::load(flags.config_file);
    } else if (run && run->exists("config.json")) {
        config = RunConfig::from_json(run->read_json("config.json"));
    }
    if (flags.seed_set) config.seed = flags.seed;
    if (flags.mock) config.gateway_mode = GatewayMode::mock;
    if (!flags.mock_corpus.empty()) config.mock_corpus_file = flags.mock_corpus;
    if (!flags.mock_script.empty()) config.mock_script_file = flags.mock_script;
    if (config.gateway_mode == GatewayMode::mock && config.mock_corpus_file.empty() &&
        fs::exists("fixtures/papers.json")) {
        config.mock_corpus_file = "fixtures/papers.json";  // bundled fixtures
    }
    if (!flags.window_spec.empty()) {
        std::string spec = flags.window_spec;
        auto take = [&spec]() {
            std::size_t colon = spec.find(':');
            std::string part = spec.substr(0, colon);
            spec = colon == std::string::npos ? "" : spec.substr(colon + 1);
            return part;
        };
        KnowledgeWindow w;
        w.model_cutoff = Date::parse(take());
        w.supplement_end = Date::parse(take());
        w.holdout_end = Date::parse(take());
        w.validate();
        config.window = w;
    }
    if (flags.verbose) logging::set_level(LogLevel::debug);
    return config;
}

std::vector<TheoryQuery> read_query_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open query file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = parse_json(buf.str());

    std::vector<TheoryQuery> queries;
    if (j.is_array()) {
        for (const auto& e : j) queries.push_back(TheoryQuery::from_json(e));
    } else if (j.contains("queries")) {
        for (const auto& e : j["queries"]) queries.push_back(TheoryQuery::from_json(e));
    } else if (j.contains("pairs")) {
        for (const auto& e : j["pairs"]) {
            QueryPair pair = QueryPair::from_json(e);
            queries.push_back(pair.general);
            queries.push_back(pair.specific);
        }
    } else {
        throw ValidationError("query file must be an array or contain 'queries' or 'pairs'");
    }
    return queries;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Literature-grounded theory synthesis and evaluation pipeline"};
    app.require_subcommand(1);

    // ---- theorize
    CommonFlags t_flags;
    std::string query_text, query_file, knowledge = "both", objective = "both", run_id;
    auto* theorize_cmd =
        app.add_subcommand("theorize", "Discover, extract, synthesize, reflect, and filter");
    add_common(theorize_cmd, t_flags);
    theorize_cmd->add_option("--query", query_text, "Theory query text");
    theorize_cmd->add_option("--query-file", query_file, "JSON file of theory queries");
    theorize_cmd->add_option("--knowledge", knowledge, "parametric | literature | both")
        ->check(CLI::IsMember({"parametric", "literature", "both"}));
    theorize_cmd->add_option("--objective", objective, "accuracy | novelty | both")
        ->check(CLI::IsMember({"accuracy", "novelty", "both"}));
    theorize_cmd->add_option("--run-id", run_id, "Run identifier (default: derived from config)");

    // ---- evaluate
    CommonFlags e_flags;
    std::string suites_csv = "judge,backtest,novelty,overlap";
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Run evaluation suites over a run");
    add_common(evaluate_cmd, e_flags);
    evaluate_cmd->add_option("--suites", suites_csv,
                             "Comma-separated subset of judge,backtest,novelty,overlap");

    // ---- report
    CommonFlags r_flags;
    bool digest_only = false;
    auto* report_cmd = app.add_subcommand("report", "Emit the HTML bundle and summary");
    add_common(report_cmd, r_flags);
    report_cmd->add_flag("--digest", digest_only, "Print the run digest and exit");

    // ---- queries
    CommonFlags q_flags;
    std::string seed_papers_file, queries_out;
    auto* queries_cmd =
        app.add_subcommand("queries", "Generate theory query pairs from seed papers");
    add_common(queries_cmd, q_flags, /*needs_run=*/false);
    queries_cmd->add_option("--seed-papers", seed_papers_file, "Seed paper index (JSON)")
        ->required();
    queries_cmd->add_option("--out", queries_out, "Output file for query pairs")->required();

    CLI11_PARSE(app, argc, argv);

    if (theorize_cmd->parsed()) {
        RunDirectory run{t_flags.run_dir};
        RunConfig config = resolve_config(t_flags, &run);
        TheorizeOptions options;
        options.run_id = run_id;
        if (!query_text.empty()) {
            TheoryQuery q;
            q.id = "query-1";
            q.text = query_text;
            q.kind = QueryKind::general;
            options.queries.push_back(q);
        }
        if (!query_file.empty()) {
            for (auto& q : read_query_file(query_file)) options.queries.push_back(std::move(q));
        }
        options.conditions.clear();
        for (const auto& c : all_conditions()) {
            if (knowledge != "both" && std::string(to_string(c.knowledge)) != knowledge) continue;
            if (objective != "both" && std::string(to_string(c.objective)) != objective) continue;
            options.conditions.push_back(c);
        }
        auto gateway = make_gateway(config, run);
        TheorizeSummary summary = run_theorize(run, config, *gateway, options);
        std::printf("run: %s\n", summary.run_id.c_str());
        for (const auto& [label, n] : summary.theories_per_condition) {
            std::printf("  %-24s %d theories\n", label.c_str(), n);
        }
        std::printf("  filtered fraction: %.3f\n", summary.filtered_fraction);
        std::printf("  run digest: %s\n", run.run_digest().c_str());
        return 0;
    }

    if (evaluate_cmd->parsed()) {
        RunDirectory run{e_flags.run_dir};
        RunConfig config = resolve_config(e_flags, &run);
        EvaluateOptions options;
        std::string token;
        std::istringstream stream(suites_csv);
        while (std::getline(stream, token, ',')) {
            if (!token.empty()) options.suites.insert(token);
        }
        auto gateway = make_gateway(config, run);
        EvaluateSummary summary = run_evaluate(run, config, *gateway, options);
        for (const auto& s : summary.ran) std::printf("suite %s: done\n", s.c_str());
        for (const auto& s : summary.skipped_complete) {
            std::printf("suite %s: already complete, skipped\n", s.c_str());
        }
        return 0;
    }

    if (report_cmd->parsed()) {
        RunDirectory run{r_flags.run_dir};
        RunConfig config = resolve_config(r_flags, &run);
        if (digest_only) {
            std::printf("%s\n", run.run_digest().c_str());
            return 0;
        }
        ReportSummary summary = emit_report(run, config);
        std::printf("report written: reports/index.html (+%d theory pages)\n",
                    summary.theory_pages);
        std::printf("run digest: %s\n", summary.run_digest.c_str());
        return 0;
    }

    if (queries_cmd->parsed()) {
        RunConfig config = resolve_config(q_flags, nullptr);
        MockIndex seed_index = MockIndex::load(seed_papers_file);
        RunDirectory scratch{fs::temp_directory_path() / "theorygen-queries"};
        auto gateway = make_gateway(config, scratch);

        auto seeds = filter_seed_papers(seed_index.papers(), config.window.model_cutoff);
        json pairs = json::array();
        int skipped = 0;
        int counter = 0;
        for (const auto& paper : seeds) {
            try {
                QueryPair pair = generate_queries(*gateway, paper,
                                                  "query-" + std::to_string(++counter));
                pairs.push_back(pair.to_json());
            } catch (const ContractViolation& e) {
                ++skipped;
                log_warn(e.what());
            }
        }
        json out;
        out["pairs"] = pairs;
        out["skipped_papers"] = skipped;
        std::ofstream of(queries_out);
        of << canonical_dump(out);
        std::printf("wrote %zu query pairs (%d papers skipped) to %s\n", pairs.size(), skipped,
                    queries_out.c_str());
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const StageError& e) {
        std::fprintf(stderr, "stage failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
