#include "theorygen/harness/report.hpp"

#include <cmath>
#include <cstdio>

#include "theorygen/harness/html.hpp"
#include "theorygen/judge/judge.hpp"
#include "theorygen/novelty/novelty.hpp"

namespace theorygen {

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string fmt_usd(double v) { return "$" + fmt(v, 4); }

std::string cell_or_dash(const json& j, int decimals) {
    if (j.is_null()) return "-";
    return fmt(j.get<double>(), decimals);
}

std::string safe_name(std::string s) {
    for (char& c : s) {
        if (c == '/' || c == '|' || c == ':') c = '_';
    }
    return s;
}

const std::vector<std::string>& condition_order() {
    static const std::vector<std::string> order = {
        "parametric-accuracy", "literature-accuracy", "parametric-novelty", "literature-novelty"};
    return order;
}

// ------------------------------------------------------------- judge section

void render_judge_section(HtmlPage& page, const json& table) {
    page.heading(2, "LLM-as-a-judge metrics");
    std::vector<std::string> header = {"Dimension"};
    for (const auto& label : condition_order()) header.push_back(label);
    header.push_back("delta % (accuracy)");
    header.push_back("delta % (novelty)");

    std::vector<std::vector<std::string>> rows;
    for (JudgeDimension dim : all_judge_dimensions()) {
        std::string dim_name(to_string(dim));
        std::vector<std::string> row = {dim_name};
        for (const auto& label : condition_order()) {
            if (table["cells"].contains(label) && table["cells"][label].contains(dim_name)) {
                const json& cell = table["cells"][label][dim_name];
                row.push_back(fmt(cell["mean"].get<double>(), 1));
            } else {
                row.push_back("-");
            }
        }
        for (const char* objective : {"accuracy", "novelty"}) {
            std::string text = "-";
            if (table["deltas"].contains(objective) &&
                table["deltas"][objective].contains(dim_name) &&
                !table["deltas"][objective][dim_name].is_null()) {
                text = std::to_string(table["deltas"][objective][dim_name].get<int>());
                if (table.contains("significance") &&
                    table["significance"][objective].contains(dim_name) &&
                    !table["significance"][objective][dim_name].is_null()) {
                    text += table["significance"][objective][dim_name]["mark"].get<std::string>();
                }
            }
            row.push_back(text);
        }
        rows.push_back(row);
    }
    std::vector<std::string> n_row = {"number of samples (laws)"};
    for (const auto& label : condition_order()) {
        if (table["cells"].contains(label)) {
            long n = 0;
            for (const auto& [_, cell] : table["cells"][label].items()) {
                n = std::max(n, cell["n"].get<long>());
            }
            n_row.push_back(std::to_string(n));
        } else {
            n_row.push_back("-");
        }
    }
    n_row.push_back("-");
    n_row.push_back("-");
    rows.push_back(n_row);
    page.table(header, rows);
    page.paragraph("delta % is the relative difference between the parametric and "
                   "literature-supported means, positive when literature is higher; ** marks "
                   "p < 0.01 and * marks p < 0.05 under one-sided bootstrap resampling.");
}

// ---------------------------------------------------------- backtest section

void render_backtest_section(HtmlPage& page, const json& report) {
    page.heading(2, "Predictive accuracy (backtesting)");
    std::vector<std::string> header = {"Row"};
    for (const auto& label : condition_order()) header.push_back(label);

    auto fetch = [&](const std::string& label, const char* key) -> json {
        if (report["conditions"].contains(label) && report["conditions"][label].contains(key)) {
            return report["conditions"][label][key];
        }
        return nullptr;
    };

    std::vector<std::vector<std::string>> rows;
    auto add_rate_row = [&](const std::string& name, const char* key) {
        std::vector<std::string> row = {name};
        for (const auto& label : condition_order()) row.push_back(cell_or_dash(fetch(label, key), 2));
        rows.push_back(row);
    };
    auto add_count_row = [&](const std::string& name, const char* key) {
        std::vector<std::string> row = {name};
        for (const auto& label : condition_order()) {
            json v = fetch(label, key);
            row.push_back(v.is_null() ? "-" : std::to_string(v.get<long>()));
        }
        rows.push_back(row);
    };

    add_rate_row("precision: supporting evidence", "mean_law_precision");
    add_rate_row("recall: laws with some evidence", "law_recall");
    add_rate_row("recall: predictions with some evidence", "prediction_recall");
    add_count_row("law-paper evaluations", "law_paper_evaluations");
    add_count_row("papers with relevant experiments (per-law)", "papers_with_relevant_experiments");
    add_count_row("papers with relevant experiments (unique)",
                  "unique_papers_with_relevant_experiments");
    add_count_row("laws with at least 1 relevant paper", "laws_with_relevant_paper");
    add_rate_row("avg. papers per law with evidence", "avg_papers_per_law_with_evidence");
    add_rate_row("likelihood of law being true (self-assessed)", "self_belief_mean");
    page.table(header, rows);

    if (report.contains("significance")) {
        std::vector<std::string> sig_header = {"Row", "accuracy", "novelty"};
        std::vector<std::vector<std::string>> sig_rows;
        for (const char* key : {"precision", "law_recall", "prediction_recall", "self_belief"}) {
            std::vector<std::string> row = {key};
            for (const char* objective : {"accuracy", "novelty"}) {
                if (report["significance"].contains(objective) &&
                    !report["significance"][objective][key].is_null()) {
                    const json& b = report["significance"][objective][key];
                    row.push_back("p=" + fmt(b["p_value"].get<double>(), 4) +
                                  b["mark"].get<std::string>());
                } else {
                    row.push_back("-");
                }
            }
            sig_rows.push_back(row);
        }
        page.heading(3, "Bootstrap significance (literature vs parametric)");
        page.table(sig_header, sig_rows);
    }
}

// ----------------------------------------------------------- novelty section

void render_novelty_section(HtmlPage& page, const json& table) {
    page.heading(2, "Qualified novelty (relative to the generation reference corpus)");
    std::vector<std::string> header = {"Novelty type"};
    for (const auto& label : condition_order()) header.push_back(label);
    std::vector<std::vector<std::string>> rows;
    for (NoveltyDimension dim : all_novelty_dimensions()) {
        std::string dim_name(to_string(dim));
        std::vector<std::string> row = {dim_name};
        for (const auto& label : condition_order()) {
            if (table["proportions"].contains(label)) {
                row.push_back(fmt(table["proportions"][label][dim_name].get<double>(), 2));
            } else {
                row.push_back("-");
            }
        }
        rows.push_back(row);
    }
    std::vector<std::string> n_row = {"number of laws evaluated"};
    for (const auto& label : condition_order()) {
        n_row.push_back(table["sample_sizes"].contains(label)
                            ? std::to_string(table["sample_sizes"][label].get<long>())
                            : "-");
    }
    rows.push_back(n_row);
    page.table(header, rows);
    page.paragraph("avg papers per evaluation: " +
                   fmt(table["avg_papers_per_evaluation"].get<double>(), 1) +
                   ", total papers evaluated: " +
                   std::to_string(table["total_papers_evaluated"].get<long>()));
}

// ----------------------------------------------------------- overlap section

std::string overlap_svg(const json& curves) {
    const int width = 640, height = 400, margin = 50;
    double max_n = 1.0;
    for (const auto& curve : curves) {
        for (const auto& p : curve["points"]) {
            max_n = std::max(max_n, static_cast<double>(p["n"].get<int>()));
        }
    }
    auto x_of = [&](double n) { return margin + (width - 2 * margin) * (n / max_n); };
    auto y_of = [&](double v) { return height - margin - (height - 2 * margin) * v; };

    const char* colors[] = {"#c0392b", "#2980b9", "#27ae60"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    svg += "<line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(height - margin) +
           "\" x2=\"" + std::to_string(width - margin) + "\" y2=\"" +
           std::to_string(height - margin) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(margin) +
           "\" x2=\"" + std::to_string(margin) + "\" y2=\"" + std::to_string(height - margin) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double v = i / 5.0;
        svg += "<text x=\"8\" y=\"" + fmt(y_of(v) + 4, 0) + "\" font-size=\"11\">" + fmt(v, 1) +
               "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(width / 2 - 40) + "\" y=\"" +
           std::to_string(height - 12) +
           "\" font-size=\"12\">sample size N</text>\n";
    svg += "<text x=\"6\" y=\"18\" font-size=\"12\">duplicate proportion</text>\n";

    int series_idx = 0;
    int legend_y = margin;
    for (const auto& curve : curves) {
        const char* color = colors[series_idx % 3];
        std::string polyline;
        for (const auto& p : curve["points"]) {
            double n = p["n"].get<int>();
            double mean = p["mean"].get<double>();
            double sd = p["stddev"].get<double>();
            polyline += fmt(x_of(n), 1) + "," + fmt(y_of(mean), 1) + " ";
            svg += "<line x1=\"" + fmt(x_of(n), 1) + "\" y1=\"" +
                   fmt(y_of(std::min(1.0, mean + sd)), 1) + "\" x2=\"" + fmt(x_of(n), 1) +
                   "\" y2=\"" + fmt(y_of(std::max(0.0, mean - sd)), 1) + "\" stroke=\"" + color +
                   "\" stroke-opacity=\"0.4\"/>\n";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" "
               "points=\"" + polyline + "\"/>\n";
        svg += "<text x=\"" + std::to_string(width - margin - 170) + "\" y=\"" +
               std::to_string(legend_y) + "\" font-size=\"12\" fill=\"" + color + "\">" +
               curve["series"].get<std::string>() + "</text>\n";
        legend_y += 16;
        ++series_idx;
    }
    svg += "</svg>\n";
    return svg;
}

void render_overlap_section(HtmlPage& page, const json& overlap) {
    page.heading(2, "Monte Carlo law overlap");
    page.raw("<p><img src=\"overlap.svg\" alt=\"overlap curves\"></p>\n");
    std::vector<std::string> header = {"series", "N", "mean duplicate proportion", "std dev"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& curve : overlap["curves"]) {
        for (const auto& p : curve["points"]) {
            rows.push_back({curve["series"].get<std::string>(),
                            std::to_string(p["n"].get<int>()), fmt(p["mean"].get<double>(), 3),
                            fmt(p["stddev"].get<double>(), 3)});
        }
    }
    page.table(header, rows);
    page.paragraph("pairwise judgments: " +
                   std::to_string(overlap["pairwise_judgments"].get<long>()));
}

// -------------------------------------------------------------- cost section

json build_cost_table(const CostLedger& ledger, const std::vector<Theory>& theories,
                      const RunDirectory& run) {
    long lit_theories = 0, param_theories = 0;
    for (const auto& t : theories) {
        (t.condition.knowledge == KnowledgeSource::literature ? lit_theories : param_theories) += 1;
    }
    long laws_total = 0;
    for (const auto& t : theories) laws_total += static_cast<long>(t.laws.size());

    long backtest_laws = 0;
    if (run.exists("evals/backtest/report.json")) {
        json report = run.read_json("evals/backtest/report.json");
        for (const auto& [_, block] : report["conditions"].items()) {
            backtest_laws += block["laws_evaluated"].get<long>();
        }
    }
    long novelty_laws = 0;
    if (run.exists("evals/novelty/table.json")) {
        json table = run.read_json("evals/novelty/table.json");
        for (const auto& [_, n] : table["sample_sizes"].items()) novelty_laws += n.get<long>();
    }

    auto stage_sum = [&](std::initializer_list<const char*> stages) {
        double sum = 0.0;
        for (const char* s : stages) sum += ledger.stage_total_usd(s);
        return sum;
    };
    auto per_unit = [](double total, long units) -> json {
        if (units <= 0) return nullptr;
        return total / static_cast<double>(units);
    };

    // row structure mirrors the per-activity cost estimates table
    json rows = json::array();
    auto add_row = [&](const std::string& activity, const json& per, const std::string& unit,
                       double total) {
        json row;
        row["activity"] = activity;
        row["usd_per_unit"] = per;
        row["unit"] = unit;
        row["total_usd"] = total;
        rows.push_back(row);
    };
    double lit_gen = stage_sum({"discovery", "extraction", "synthesis-literature",
                                "reflection-literature"});
    double param_gen = stage_sum({"synthesis-parametric", "reflection-parametric"});
    add_row("theory generation: literature-supported", per_unit(lit_gen, lit_theories), "theory",
            lit_gen);
    add_row("theory generation: parametric only", per_unit(param_gen, param_theories), "theory",
            param_gen);
    double judge_total = stage_sum({"judge"});
    add_row("llm-as-a-judge metrics", per_unit(judge_total, laws_total), "law", judge_total);
    double backtest_total = stage_sum({"backtest-rubric", "backtest-judge", "self-belief"});
    add_row("predictive accuracy", per_unit(backtest_total, backtest_laws), "law", backtest_total);
    double novelty_total = stage_sum({"novelty-per-paper", "novelty-consolidate"});
    add_row("novelty evaluation", per_unit(novelty_total, novelty_laws), "law", novelty_total);
    double overlap_total = stage_sum({"overlap"});
    add_row("overlap analysis", per_unit(overlap_total, laws_total), "law", overlap_total);
    return rows;
}

void render_cost_section(HtmlPage& page, const json& cost_rows, const CostLedger& ledger) {
    page.heading(2, "Estimated model API costs");
    std::vector<std::string> header = {"Activity", "Cost estimate", "Total"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : cost_rows) {
        std::string per = row["usd_per_unit"].is_null()
                              ? "-"
                              : fmt_usd(row["usd_per_unit"].get<double>()) + " per " +
                                    row["unit"].get<std::string>();
        rows.push_back({row["activity"].get<std::string>(), per,
                        fmt_usd(row["total_usd"].get<double>())});
    }
    page.table(header, rows);

    page.heading(3, "Ledger totals per stage");
    std::map<std::string, std::pair<long, double>> stages;
    for (const auto& e : ledger.entries()) {
        stages[e.stage].first += 1;
        stages[e.stage].second += e.usd;
    }
    std::vector<std::vector<std::string>> stage_rows;
    for (const auto& [stage, acc] : stages) {
        stage_rows.push_back({stage, std::to_string(acc.first), fmt_usd(acc.second)});
    }
    stage_rows.push_back({"total", std::to_string(ledger.size()), fmt_usd(ledger.total_usd())});
    page.table({"Stage", "Calls", "USD"}, stage_rows);
}

// ------------------------------------------------------------- theory pages

void render_theory_page(const RunDirectory& run, const Theory& theory,
                        const std::set<std::string>& kept_ids) {
    HtmlPage page("Theory " + theory.id + ": " + theory.name);
    page.paragraph("Condition: " + theory.condition.label());
    page.paragraph("Query: " + theory.provenance.query_id +
                   ", evidence digest: " + theory.provenance.evidence_digest.substr(0, 12));
    page.heading(2, "Description");
    page.paragraph(theory.description);

    for (std::size_t i = 0; i < theory.laws.size(); ++i) {
        const Law& law = theory.laws[i];
        std::string law_id = make_law_id(theory.id, i);
        page.heading(2, "Law " + law_id + ": " + law.name);
        if (!kept_ids.count(law_id)) {
            page.paragraph("[filtered by self-assessed novelty; excluded from evaluation]");
        }
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"statement", law.statement});
        rows.push_back({"type", std::string(to_string(law.law_type))});
        rows.push_back({"scope", law.scope});
        std::string cases;
        for (const auto& c : law.special_cases) cases += c + " ";
        rows.push_back({"special cases", cases});
        std::string evidence;
        for (const auto& e : law.evidence) {
            evidence += e.description + " [";
            for (const auto& u : e.uuids) evidence += u.to_string() + " ";
            evidence += "] ";
        }
        rows.push_back({"evidence", evidence});
        rows.push_back({"self-novelty", std::string(to_string(law.self_novelty.classification)) +
                                            ": " + law.self_novelty.what_is_novel});
        page.table({"field", "value"}, rows);

        std::string rubric_rel = "evals/backtest/rubrics/" + safe_name(law_id) + ".json";
        if (run.exists(rubric_rel)) {
            json rubric = run.read_json(rubric_rel);
            page.heading(3, "Prediction rubric results");
            std::vector<std::vector<std::string>> pr_rows;
            for (const auto& pred : rubric["predictions"]) {
                std::string short_name = pred["short_name"].get<std::string>();
                long supp = 0, cont = 0, none = 0;
                for (const auto& fname :
                     run.list_files("evals/backtest/judgments/" + safe_name(law_id))) {
                    json judgment =
                        run.read_json("evals/backtest/judgments/" + safe_name(law_id) + "/" + fname);
                    if (judgment["prediction_short_name"].get<std::string>() != short_name) continue;
                    std::string verdict = judgment["verdict"].get<std::string>();
                    if (verdict == "support") ++supp;
                    else if (verdict == "contradict") ++cont;
                    else ++none;
                }
                std::string precision =
                    (supp + cont) > 0
                        ? fmt(static_cast<double>(supp) / static_cast<double>(supp + cont), 2)
                        : "no evidence";
                pr_rows.push_back({short_name, pred["specific_prediction"].get<std::string>(),
                                   std::to_string(supp), std::to_string(cont),
                                   std::to_string(none), precision});
            }
            page.table({"prediction", "statement", "support", "contradict", "no evidence",
                        "precision"},
                       pr_rows);
        }

        std::string novelty_rel = "evals/novelty/laws/" + safe_name(law_id) + ".json";
        if (run.exists(novelty_rel)) {
            json novelty = run.read_json(novelty_rel);
            page.heading(3, "Qualified novelty");
            std::vector<std::vector<std::string>> nov_rows;
            for (const auto& c : novelty["consolidated"]) {
                nov_rows.push_back({c["dimension"].get<std::string>(),
                                    c["degree"].get<std::string>(),
                                    c["novel_flag"].get<bool>() ? "novel" : "not novel",
                                    c["what_novel"].get<std::string>()});
            }
            page.table({"dimension", "degree", "flag", "what is novel"}, nov_rows);
        }

        auto pair_files = run.list_files("evals/overlap/pairs");
        std::vector<std::vector<std::string>> dup_rows;
        for (const auto& fname : pair_files) {
            json pair = run.read_json("evals/overlap/pairs/" + fname);
            if (pair["law_a_id"].get<std::string>() != law_id &&
                pair["law_b_id"].get<std::string>() != law_id) {
                continue;
            }
            dup_rows.push_back({pair["law_a_id"].get<std::string>(),
                                pair["law_b_id"].get<std::string>(),
                                pair["verdict"].get<std::string>()});
        }
        if (!dup_rows.empty()) {
            page.heading(3, "Duplicate judgments involving this law");
            page.table({"law A", "law B", "verdict"}, dup_rows);
        }
    }
    run.write_text("reports/" + theory.id + ".html", page.render());
}

}  // namespace

ReportSummary emit_report(const RunDirectory& run, const RunConfig& config) {
    bool any_eval = false;
    for (const char* suite : {"judge", "backtest", "novelty", "overlap"}) {
        if (run.stage_complete(std::string("eval-") + suite)) any_eval = true;
    }
    if (!any_eval) {
        throw StageError("report", "no evaluation suite has completed; nothing to report");
    }

    ReportSummary summary;
    // digest of the run contents prior to report emission
    summary.run_digest = run.run_digest();

    RunManifest manifest = RunManifest::from_json(run.read_json("manifest.json"));
    std::vector<Theory> theories = load_theories(run);
    CostLedger ledger = run.load_ledger(config.prices);

    std::set<std::string> kept_ids;
    json quarantine = run.read_json("quarantine/summary.json");
    for (const auto& [label, block] : quarantine["conditions"].items()) {
        (void)label;
        for (const auto& id : block["kept"]) kept_ids.insert(id.get<std::string>());
    }

    HtmlPage index("Run report: " + manifest.run_id);
    index.paragraph("Seed: " + std::to_string(manifest.random_seed) +
                    ", knowledge window: " + manifest.knowledge_window.model_cutoff.to_string() +
                    " / " + manifest.knowledge_window.supplement_end.to_string() + " / " +
                    manifest.knowledge_window.holdout_end.to_string());
    index.paragraph("Run digest: " + summary.run_digest);

    index.heading(2, "Theories");
    std::map<std::string, long> per_condition;
    for (const auto& t : theories) per_condition[t.condition.label()] += 1;
    std::vector<std::vector<std::string>> theory_rows;
    for (const auto& label : condition_order()) {
        std::string filtered = "-";
        if (quarantine["conditions"].contains(label)) {
            filtered = fmt(quarantine["conditions"][label]["filtered_fraction"].get<double>(), 3);
        }
        theory_rows.push_back({label,
                               per_condition.count(label) ? std::to_string(per_condition[label])
                                                          : "0",
                               filtered});
    }
    index.table({"condition", "theories", "self-novelty filtered fraction"}, theory_rows);

    json summary_json;
    summary_json["run_id"] = manifest.run_id;
    summary_json["run_digest"] = summary.run_digest;
    summary_json["theories_per_condition"] = per_condition;

    if (run.exists("evals/judge/table.json")) {
        json table = run.read_json("evals/judge/table.json");
        render_judge_section(index, table);
        summary_json["judge"] = table;
    }
    if (run.exists("evals/backtest/report.json")) {
        json report = run.read_json("evals/backtest/report.json");
        render_backtest_section(index, report);
        summary_json["backtest"] = report;
    }
    if (run.exists("evals/novelty/table.json")) {
        json table = run.read_json("evals/novelty/table.json");
        render_novelty_section(index, table);
        summary_json["novelty"] = table;
    }
    if (run.exists("evals/overlap/curves.json")) {
        json overlap = run.read_json("evals/overlap/curves.json");
        run.write_text("reports/overlap.svg", overlap_svg(overlap["curves"]));
        render_overlap_section(index, overlap);
        summary_json["overlap"] = overlap;
    }

    json cost_rows = build_cost_table(ledger, theories, run);
    render_cost_section(index, cost_rows, ledger);
    summary_json["cost_table"] = cost_rows;
    json stage_totals = json::object();
    for (const auto& e : ledger.entries()) {
        if (!stage_totals.contains(e.stage)) stage_totals[e.stage] = 0.0;
        stage_totals[e.stage] = stage_totals[e.stage].get<double>() + e.usd;
    }
    summary_json["ledger"] = json{{"total_usd", ledger.total_usd()},
                                  {"entries", ledger.size()},
                                  {"per_stage_usd", stage_totals}};

    index.heading(2, "Theory pages");
    for (const auto& t : theories) {
        index.link(t.id + ".html", t.id + ": " + t.name);
        render_theory_page(run, t, kept_ids);
        ++summary.theory_pages;
    }

    run.write_text("reports/index.html", index.render());
    run.write_json("reports/summary.json", summary_json);
    return summary;
}

}  // namespace theorygen
