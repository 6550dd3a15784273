#include "theorygen/harness/evaluate.hpp"

#include <algorithm>
#include <chrono>

#include "theorygen/backtest/backtest.hpp"
#include "theorygen/core/log.hpp"
#include "theorygen/core/rng.hpp"
#include "theorygen/judge/judge.hpp"
#include "theorygen/novelty/novelty.hpp"
#include "theorygen/overlap/overlap.hpp"
#include "theorygen/stats/bootstrap.hpp"

namespace theorygen {

namespace {

std::string safe_name(std::string s) {
    for (char& c : s) {
        if (c == '/' || c == '|' || c == ':') c = '_';
    }
    return s;
}

json bootstrap_json(const std::vector<double>& lit, const std::vector<double>& param,
                    long resamples, std::uint64_t seed) {
    if (lit.empty() || param.empty()) return nullptr;
    BootstrapResult r =
        bootstrap_one_sided(lit, param, resamples, TestDirection::greater, seed);
    json j;
    j["observed_delta"] = r.observed_delta;
    j["p_value"] = r.p_value;
    j["n_resamples"] = r.n_resamples;
    j["direction"] = std::string(to_string(r.direction));
    j["mark"] = std::string(mark_symbol(significance_mark(r.p_value)));
    return j;
}

// -------------------------------------------------------------------- judge

void run_judge_suite(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                     const std::vector<KeptLaw>& kept) {
    std::vector<JudgeScore> scores;
    std::map<std::string, GenerationCondition> condition_of_law;
    std::map<std::string, long> unscored;

    for (const auto& law : kept) {
        condition_of_law[law.ref.law_id()] = law.ref.condition;
        for (JudgeDimension dim : all_judge_dimensions()) {
            try {
                JudgeScore score = score_law(gateway, law.ref, law.theory_description, dim);
                run.write_json("evals/judge/scores/" + safe_name(score.law_id) + "." +
                                   std::string(to_string(dim)) + ".json",
                               score.to_json());
                scores.push_back(std::move(score));
            } catch (const ContractViolation& e) {
                unscored[law.ref.condition.label()] += 1;
                log_warn(std::string("judge: ") + e.what());
            } catch (const GatewayError& e) {
                unscored[law.ref.condition.label()] += 1;
                log_warn(std::string("judge: ") + e.what());
            }
        }
    }

    ConditionTable table = aggregate_condition_table(scores, condition_of_law);

    json significance = json::object();
    for (Objective objective : {Objective::accuracy, Objective::novelty}) {
        GenerationCondition param{KnowledgeSource::parametric, objective};
        GenerationCondition lit{KnowledgeSource::literature, objective};
        json per_dim = json::object();
        for (JudgeDimension dim : all_judge_dimensions()) {
            std::vector<double> lit_scores, param_scores;
            for (const auto& s : scores) {
                const auto& cond = condition_of_law[s.law_id];
                if (s.dimension != dim) continue;
                if (cond == lit) lit_scores.push_back(s.score);
                if (cond == param) param_scores.push_back(s.score);
            }
            per_dim[std::string(to_string(dim))] = bootstrap_json(
                lit_scores, param_scores, config.judge_resamples,
                derive_seed(config.seed, "judge-boot-" + std::string(to_string(objective)) +
                                             "-" + std::string(to_string(dim))));
        }
        significance[std::string(to_string(objective))] = per_dim;
    }

    json out = table.to_json();
    out["significance"] = significance;
    json unscored_j = json::object();
    for (const auto& [label, n] : unscored) unscored_j[label] = n;
    out["unscored"] = unscored_j;
    run.write_json("evals/judge/table.json", out);
}

// ----------------------------------------------------------------- backtest

void run_backtest_suite(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                        const std::vector<KeptLaw>& kept) {
    std::map<std::string, std::vector<LawJudgments>> per_condition;
    std::map<std::string, std::vector<double>> belief_per_condition;
    std::map<std::string, long> excluded;

    for (const auto& law : kept) {
        std::string label = law.ref.condition.label();
        PredictionRubric rubric;
        try {
            rubric = generate_rubric(gateway, law.ref);
        } catch (const ContractViolation& e) {
            excluded[label] += 1;
            log_warn(std::string("backtest: rubric excluded for ") + law.ref.law_id() + ": " +
                     e.what());
            continue;
        }
        run.write_json("evals/backtest/rubrics/" + safe_name(rubric.law_id) + ".json",
                       rubric.to_json());

        auto papers = find_evaluation_papers(gateway, rubric, law.ref.law.statement, config.window,
                                             config.backtest_search_cap);
        for (auto& paper : papers) {
            if (auto text = gateway.fetch_full_text(paper.paper_id)) paper.full_text = *text;
        }

        LawJudgments lj;
        lj.law_id = rubric.law_id;
        lj.rubric = rubric;
        for (const auto& paper : papers) {
            for (const auto& prediction : rubric.predictions) {
                EvidenceJudgment judgment =
                    judge_evidence(gateway, paper, prediction, rubric.law_id);
                run.write_json("evals/backtest/judgments/" + safe_name(rubric.law_id) + "/" +
                                   safe_name(paper.paper_id) + "." +
                                   safe_name(prediction.short_name) + ".json",
                               judgment.to_json());
                lj.judgments.push_back(std::move(judgment));
            }
        }
        per_condition[label].push_back(std::move(lj));

        BeliefEstimate belief = gateway.self_belief_samples(
            law.ref.law.statement, config.belief_samples, "self-belief");
        json belief_j;
        belief_j["law_id"] = law.ref.law_id();
        belief_j["n_requested"] = belief.n_requested;
        belief_j["n_effective"] = belief.n_effective;
        belief_j["estimate"] = belief.estimate;
        json votes = json::array();
        for (bool v : belief.votes) votes.push_back(v);
        belief_j["votes"] = votes;
        run.write_json("evals/backtest/belief/" + safe_name(law.ref.law_id()) + ".json", belief_j);
        belief_per_condition[label].push_back(belief.estimate);
    }

    json report = json::object();
    json conditions_j = json::object();
    for (const auto& condition : all_conditions()) {
        auto it = per_condition.find(condition.label());
        if (it == per_condition.end()) continue;
        PrecisionRecallReport pr = compute_recall(it->second);
        json block = pr.to_json();
        const auto& beliefs = belief_per_condition[condition.label()];
        double belief_mean = 0.0;
        for (double b : beliefs) belief_mean += b;
        block["self_belief_mean"] =
            beliefs.empty() ? json(nullptr) : json(belief_mean / beliefs.size());
        block["laws_evaluated"] = it->second.size();
        block["excluded_laws"] = excluded.count(condition.label())
                                     ? excluded[condition.label()]
                                     : 0;
        conditions_j[condition.label()] = block;
    }
    report["conditions"] = conditions_j;

    json significance = json::object();
    for (Objective objective : {Objective::accuracy, Objective::novelty}) {
        GenerationCondition param{KnowledgeSource::parametric, objective};
        GenerationCondition lit{KnowledgeSource::literature, objective};
        auto pit = per_condition.find(param.label());
        auto lit_it = per_condition.find(lit.label());
        if (pit == per_condition.end() || lit_it == per_condition.end()) continue;

        auto precisions = [](const std::vector<LawJudgments>& laws) {
            std::vector<double> out;
            for (const auto& lj : laws) {
                if (auto p = law_precision(lj.rubric, lj.judgments)) out.push_back(*p);
            }
            return out;
        };
        auto law_hits = [](const std::vector<LawJudgments>& laws) {
            std::vector<double> out;
            for (const auto& lj : laws) {
                bool hit = std::any_of(lj.judgments.begin(), lj.judgments.end(),
                                       [](const EvidenceJudgment& j) {
                                           return j.verdict != Verdict::no_evidence;
                                       });
                out.push_back(hit ? 1.0 : 0.0);
            }
            return out;
        };
        auto prediction_hits = [](const std::vector<LawJudgments>& laws) {
            std::vector<double> out;
            for (const auto& lj : laws) {
                for (const auto& pred : lj.rubric.predictions) {
                    bool hit = std::any_of(lj.judgments.begin(), lj.judgments.end(),
                                           [&](const EvidenceJudgment& j) {
                                               return j.prediction_short_name == pred.short_name &&
                                                      j.verdict != Verdict::no_evidence;
                                           });
                    out.push_back(hit ? 1.0 : 0.0);
                }
            }
            return out;
        };

        json rows = json::object();
        auto seed_for = [&](const char* row) {
            return derive_seed(config.seed, std::string("backtest-boot-") +
                                                std::string(to_string(objective)) + "-" + row);
        };
        rows["precision"] = bootstrap_json(precisions(lit_it->second), precisions(pit->second),
                                           config.backtest_resamples, seed_for("precision"));
        rows["law_recall"] = bootstrap_json(law_hits(lit_it->second), law_hits(pit->second),
                                            config.backtest_resamples, seed_for("law_recall"));
        rows["prediction_recall"] =
            bootstrap_json(prediction_hits(lit_it->second), prediction_hits(pit->second),
                           config.backtest_resamples, seed_for("prediction_recall"));
        rows["self_belief"] = bootstrap_json(belief_per_condition[lit.label()],
                                             belief_per_condition[param.label()],
                                             config.backtest_resamples, seed_for("self_belief"));
        significance[std::string(to_string(objective))] = rows;
    }
    report["significance"] = significance;
    run.write_json("evals/backtest/report.json", report);
}

// ------------------------------------------------------------------ novelty

void run_novelty_suite(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                       const std::vector<KeptLaw>& kept) {
    std::map<std::string, std::vector<const KeptLaw*>> by_condition;
    for (const auto& law : kept) by_condition[law.ref.condition.label()].push_back(&law);

    std::map<std::string, Corpus> corpora;
    auto corpus_for = [&](const std::string& query_id) -> const Corpus& {
        auto it = corpora.find(query_id);
        if (it == corpora.end()) {
            it = corpora.emplace(query_id, load_corpus(run, query_id)).first;
        }
        return it->second;
    };

    std::vector<LawNoveltyEvaluation> evaluations;
    long papers_evaluated = 0;
    std::map<std::string, long> failed;

    for (const auto& [label, laws] : by_condition) {
        std::size_t sample_size =
            std::min<std::size_t>(laws.size(), static_cast<std::size_t>(config.novelty_sample_size));
        Rng rng(derive_seed(config.seed, "novelty-sample-" + label));
        auto indices = rng.sample_indices(laws.size(), sample_size);

        for (std::size_t idx : indices) {
            const KeptLaw& law = *laws[idx];
            const Corpus& corpus = corpus_for(law.query_id);
            try {
                LawNoveltyEvaluation eval;
                eval.law_id = law.ref.law_id();
                eval.condition = law.ref.condition;
                json per_paper_j = json::array();
                // exactly 7 x |corpus| per-paper calls and 7 consolidations per law
                for (NoveltyDimension dim : all_novelty_dimensions()) {
                    std::vector<PerPaperNovelty> assessments;
                    for (const auto& paper : corpus.papers) {
                        assessments.push_back(judge_paper_novelty(gateway, law.ref, paper, dim));
                        per_paper_j.push_back(assessments.back().to_json());
                    }
                    eval.consolidated.push_back(consolidate(gateway, law.ref, dim,
                                                            std::move(assessments),
                                                            config.novel_degrees));
                }
                json law_j;
                law_j["law_id"] = eval.law_id;
                law_j["condition"] = eval.condition.to_json();
                law_j["query_id"] = law.query_id;
                law_j["per_paper"] = per_paper_j;
                json consolidated_j = json::array();
                for (const auto& c : eval.consolidated) consolidated_j.push_back(c.to_json());
                law_j["consolidated"] = consolidated_j;
                run.write_json("evals/novelty/laws/" + safe_name(eval.law_id) + ".json", law_j);
                papers_evaluated += static_cast<long>(corpus.papers.size());
                evaluations.push_back(std::move(eval));
            } catch (const StageError& e) {
                failed[label] += 1;
                log_warn(std::string("novelty: law ") + law.ref.law_id() + " failed: " + e.what());
            } catch (const GatewayError& e) {
                failed[label] += 1;
                log_warn(std::string("novelty: law ") + law.ref.law_id() + " failed: " + e.what());
            }
        }
    }

    NoveltyTable table = novelty_proportion_table(evaluations);
    json out = table.to_json();
    out["total_papers_evaluated"] = papers_evaluated;
    out["avg_papers_per_evaluation"] =
        evaluations.empty() ? 0.0
                            : static_cast<double>(papers_evaluated) /
                                  static_cast<double>(evaluations.size());
    json failed_j = json::object();
    for (const auto& [label, n] : failed) failed_j[label] = n;
    out["failed_laws"] = failed_j;
    run.write_json("evals/novelty/table.json", out);
}

// ------------------------------------------------------------------ overlap

void run_overlap_suite(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                       const std::vector<KeptLaw>& kept) {
    std::vector<LawRef> parametric, literature;
    for (const auto& law : kept) {
        if (law.ref.condition.knowledge == KnowledgeSource::parametric) {
            parametric.push_back(law.ref);
        } else {
            literature.push_back(law.ref);
        }
    }

    PairJudgmentCache cache;
    DuplicateFn is_dup = gateway_duplicate_fn(gateway, cache);

    json curves = json::array();
    auto run_series = [&](const std::vector<LawRef>& pool_a, const std::vector<LawRef>& pool_b,
                          bool within, OverlapSeries series) {
        if (pool_a.empty() || pool_b.empty() || (within && pool_b.size() < 2)) {
            log_warn("overlap: skipping series " + std::string(to_string(series)) +
                     " (pool too small)");
            return;
        }
        OverlapCurve curve = monte_carlo_curve(pool_a, pool_b, within, config.overlap_n_values,
                                               config.overlap_samples_per_point,
                                               derive_seed(config.seed, "overlap"), is_dup, series);
        curves.push_back(curve.to_json());
    };
    run_series(parametric, parametric, true, OverlapSeries::within_parametric);
    run_series(literature, literature, true, OverlapSeries::within_literature);
    run_series(parametric, literature, false, OverlapSeries::across);

    for (const auto& judgment : cache.all()) {
        run.write_json("evals/overlap/pairs/" +
                           safe_name(PairJudgmentCache::pair_key(judgment.law_a_id,
                                                                 judgment.law_b_id)) +
                           ".json",
                       judgment.to_json());
    }
    json out;
    out["curves"] = curves;
    out["pairwise_judgments"] = cache.size();
    run.write_json("evals/overlap/curves.json", out);
}

}  // namespace

EvaluateSummary run_evaluate(const RunDirectory& run, const RunConfig& config, Gateway& gateway,
                             const EvaluateOptions& options) {
    EvaluateSummary summary;
    if (options.suites.empty()) return summary;  // explicit no-op
    for (const auto& suite : options.suites) {
        if (!all_eval_suites().count(suite)) {
            throw ValidationError("unknown evaluation suite: '" + suite + "'");
        }
    }
    auto lock = run.acquire_lock();
    run.ensure_layout();
    if (!run.exists("quarantine/summary.json")) {
        throw StageError("evaluate", "run contains no filtered theories; run theorize first");
    }
    std::vector<KeptLaw> kept = load_kept_laws(run);

    std::string ledger_base = run.exists("ledger.jsonl") ? run.read_text("ledger.jsonl") : "";

    for (const char* suite : {"judge", "backtest", "novelty", "overlap"}) {
        if (!options.suites.count(suite)) continue;
        std::string marker = std::string("eval-") + suite;
        if (run.stage_complete(marker)) {
            summary.skipped_complete.insert(suite);
            continue;
        }
        auto start = std::chrono::steady_clock::now();
        if (std::string(suite) == "judge") run_judge_suite(run, config, gateway, kept);
        if (std::string(suite) == "backtest") run_backtest_suite(run, config, gateway, kept);
        if (std::string(suite) == "novelty") run_novelty_suite(run, config, gateway, kept);
        if (std::string(suite) == "overlap") run_overlap_suite(run, config, gateway, kept);
        run.append_timing(marker, std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - start)
                                      .count());
        run.mark_stage_complete(marker, json{{"laws", kept.size()}});
        run.write_text("ledger.jsonl", ledger_base + gateway.ledger().to_jsonl());
        summary.ran.insert(suite);
    }
    return summary;
}

}  // namespace theorygen
