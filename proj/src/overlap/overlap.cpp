#include "theorygen/overlap/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "theorygen/core/rng.hpp"

namespace theorygen {

std::string_view to_string(SimilarityTag t) {
    return t == SimilarityTag::essential ? "ESSENTIAL" : "NON_ESSENTIAL";
}

SimilarityTag parse_similarity_tag(const std::string& s) {
    if (s == "ESSENTIAL") return SimilarityTag::essential;
    if (s == "NON_ESSENTIAL") return SimilarityTag::non_essential;
    throw ValidationError("unknown similarity tag: '" + s + "'");
}

json TaggedStatement::to_json() const {
    json j;
    j["text"] = text;
    j["tag"] = std::string(to_string(tag));
    return j;
}

TaggedStatement TaggedStatement::from_json(const json& j) {
    JsonReader r(j, "TaggedStatement");
    TaggedStatement t;
    t.text = r.require_string("text");
    t.tag = parse_similarity_tag(r.require_string("tag"));
    return t;
}

std::string_view to_string(DuplicateVerdict v) {
    return v == DuplicateVerdict::duplicates ? "duplicates" : "not_duplicates";
}

DuplicateVerdict parse_duplicate_verdict(const std::string& s) {
    if (s == "duplicates") return DuplicateVerdict::duplicates;
    if (s == "not_duplicates") return DuplicateVerdict::not_duplicates;
    throw ValidationError("unknown duplicate verdict: '" + s + "'");
}

void DuplicateJudgment::validate() const {
    if (core_claim_a.empty() || core_claim_b.empty()) {
        throw ValidationError("duplicate judgment needs both core claims");
    }
}

json DuplicateJudgment::to_json() const {
    json j = extra;
    j["law_a_id"] = law_a_id;
    j["law_b_id"] = law_b_id;
    j["core_claim_a"] = core_claim_a;
    j["core_claim_b"] = core_claim_b;
    json sims = json::array();
    for (const auto& s : similarities) sims.push_back(s.to_json());
    j["similarities"] = sims;
    json diffs = json::array();
    for (const auto& d : differences) diffs.push_back(d.to_json());
    j["differences"] = diffs;
    j["reasoning"] = reasoning;
    j["verdict"] = std::string(to_string(verdict));
    if (audit_flag) j["audit_flag"] = *audit_flag;
    return j;
}

DuplicateJudgment DuplicateJudgment::from_json(const json& j) {
    JsonReader r(j, "DuplicateJudgment");
    DuplicateJudgment d;
    d.law_a_id = r.require_string("law_a_id");
    d.law_b_id = r.require_string("law_b_id");
    d.core_claim_a = r.require_string("core_claim_a");
    d.core_claim_b = r.require_string("core_claim_b");
    if (const json* v = r.find("similarities")) {
        for (const auto& e : *v) d.similarities.push_back(TaggedStatement::from_json(e));
    }
    if (const json* v = r.find("differences")) {
        for (const auto& e : *v) d.differences.push_back(TaggedStatement::from_json(e));
    }
    d.reasoning = r.string_or("reasoning", "");
    d.verdict = parse_duplicate_verdict(r.require_string("verdict"));
    if (const json* v = r.find("audit_flag")) d.audit_flag = v->get<std::string>();
    d.extra = r.take_extra();
    d.validate();
    return d;
}

DuplicateJudgment judge_duplicate(Gateway& gateway, const LawRef& a, const LawRef& b) {
    if (a.law_id() == b.law_id()) {
        throw ValidationError("duplicate judging requires two distinct laws");
    }
    // fix prompt order by id so judge_duplicate(a, b) == judge_duplicate(b, a)
    const LawRef& first = a.law_id() < b.law_id() ? a : b;
    const LawRef& second = a.law_id() < b.law_id() ? b : a;

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::judge_duplicate;
    request.variables["law_a_name"] = first.law.name;
    request.variables["law_a_statement"] = first.law.statement;
    request.variables["law_b_name"] = second.law.name;
    request.variables["law_b_statement"] = second.law.statement;
    request.variables["law_a_id"] = first.law_id();
    request.variables["law_b_id"] = second.law_id();
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"core_claim_a", "core_claim_b", "similarities",
                               "differences",  "reasoning",    "verdict"};
    request.stage = "overlap";

    DuplicateJudgment judgment;
    judgment.law_a_id = first.law_id();
    judgment.law_b_id = second.law_id();
    try {
        json j = parse_json(gateway.chat(request).text);
        judgment.core_claim_a = j["core_claim_a"].get<std::string>();
        judgment.core_claim_b = j["core_claim_b"].get<std::string>();
        for (const auto& e : j["similarities"]) {
            judgment.similarities.push_back(TaggedStatement::from_json(e));
        }
        for (const auto& e : j["differences"]) {
            judgment.differences.push_back(TaggedStatement::from_json(e));
        }
        judgment.reasoning = j["reasoning"].get<std::string>();
        judgment.verdict = parse_duplicate_verdict(j["verdict"].get<std::string>());
        judgment.validate();
    } catch (const ContractViolation& e) {
        judgment.core_claim_a = first.law.statement;
        judgment.core_claim_b = second.law.statement;
        judgment.reasoning = "contract violation";
        judgment.verdict = DuplicateVerdict::not_duplicates;
        judgment.audit_flag = e.what();
    } catch (const ValidationError& e) {
        judgment.core_claim_a = first.law.statement;
        judgment.core_claim_b = second.law.statement;
        judgment.reasoning = "invalid judgment payload";
        judgment.verdict = DuplicateVerdict::not_duplicates;
        judgment.audit_flag = e.what();
    }
    return judgment;
}

std::string PairJudgmentCache::pair_key(const std::string& id_a, const std::string& id_b) {
    return id_a < id_b ? id_a + "|" + id_b : id_b + "|" + id_a;
}

const DuplicateJudgment* PairJudgmentCache::find(const std::string& id_a,
                                                 const std::string& id_b) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = judgments_.find(pair_key(id_a, id_b));
    return it == judgments_.end() ? nullptr : &it->second;
}

void PairJudgmentCache::insert(DuplicateJudgment judgment) {
    std::lock_guard<std::mutex> lock(mutex_);
    judgments_.emplace(pair_key(judgment.law_a_id, judgment.law_b_id), std::move(judgment));
}

std::vector<DuplicateJudgment> PairJudgmentCache::all() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<DuplicateJudgment> out;
    out.reserve(judgments_.size());
    for (const auto& [_, j] : judgments_) out.push_back(j);
    return out;
}

std::size_t PairJudgmentCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return judgments_.size();
}

std::string_view to_string(OverlapSeries s) {
    switch (s) {
        case OverlapSeries::within_parametric: return "within_parametric";
        case OverlapSeries::within_literature: return "within_literature";
        case OverlapSeries::across: return "across";
    }
    return "across";
}

json OverlapCurve::to_json() const {
    json j;
    j["series"] = std::string(to_string(series));
    json pts = json::array();
    for (const auto& p : points) {
        json pj;
        pj["n"] = p.sample_size;
        pj["mean"] = p.mean;
        pj["stddev"] = p.stddev;
        pj["capped"] = p.capped;
        pts.push_back(pj);
    }
    j["points"] = pts;
    j["samples_per_point"] = samples_per_point;
    j["comparisons"] = comparisons;
    return j;
}

OverlapCurve monte_carlo_curve(const std::vector<LawRef>& pool_a,
                               const std::vector<LawRef>& pool_b, bool within_series,
                               const std::vector<int>& n_values, int samples_per_point,
                               std::uint64_t seed, const DuplicateFn& is_duplicate,
                               OverlapSeries series_label) {
    if (pool_a.empty() || pool_b.empty()) {
        throw ValidationError("monte carlo pools must be non-empty");
    }
    if (samples_per_point < 1) throw ValidationError("samples_per_point must be >= 1");

    std::vector<int> ns = n_values;
    std::sort(ns.begin(), ns.end());

    OverlapCurve curve;
    curve.series = series_label;
    curve.samples_per_point = samples_per_point;
    long comparisons = 0;

    for (int n : ns) {
        if (n < 1) throw ValidationError("sample sizes must be >= 1");
        OverlapPoint point;
        point.sample_size = n;
        std::vector<double> outcomes;
        outcomes.reserve(samples_per_point);

        for (int trial = 0; trial < samples_per_point; ++trial) {
            Rng rng(derive_seed(seed, std::string(to_string(series_label)) + "-n" +
                                          std::to_string(n),
                                static_cast<std::uint64_t>(trial)));
            const LawRef& probe = pool_a[rng.below(pool_a.size())];

            std::vector<std::size_t> candidates;
            candidates.reserve(pool_b.size());
            for (std::size_t i = 0; i < pool_b.size(); ++i) {
                // a within-series trial never compares a law against itself
                if (within_series && pool_b[i].law_id() == probe.law_id()) continue;
                candidates.push_back(i);
            }
            std::size_t draw = static_cast<std::size_t>(n);
            if (draw > candidates.size()) {
                draw = candidates.size();  // capped, sampling without replacement
                point.capped = true;
            }
            rng.shuffle(candidates);

            bool duplicated = false;
            for (std::size_t i = 0; i < draw; ++i) {
                ++comparisons;
                if (is_duplicate(probe, pool_b[candidates[i]])) {
                    duplicated = true;
                    break;
                }
            }
            outcomes.push_back(duplicated ? 1.0 : 0.0);
        }

        double mean = 0.0;
        for (double o : outcomes) mean += o;
        mean /= static_cast<double>(outcomes.size());
        double var = 0.0;
        for (double o : outcomes) var += (o - mean) * (o - mean);
        if (outcomes.size() > 1) var /= static_cast<double>(outcomes.size() - 1);
        point.mean = mean;
        point.stddev = std::sqrt(var);
        curve.points.push_back(point);
    }
    curve.comparisons = comparisons;
    return curve;
}

DuplicateFn gateway_duplicate_fn(Gateway& gateway, PairJudgmentCache& cache) {
    return [&gateway, &cache](const LawRef& a, const LawRef& b) {
        if (const DuplicateJudgment* hit = cache.find(a.law_id(), b.law_id())) {
            return hit->verdict == DuplicateVerdict::duplicates;
        }
        DuplicateJudgment judgment = judge_duplicate(gateway, a, b);
        bool dup = judgment.verdict == DuplicateVerdict::duplicates;
        cache.insert(std::move(judgment));
        return dup;
    };
}

}  // namespace theorygen
