#include "theorygen/synthesis/synthesis.hpp"

#include <algorithm>

#include "theorygen/core/log.hpp"
#include "theorygen/core/rng.hpp"
#include "theorygen/core/text.hpp"

namespace theorygen {

std::set<EvidenceUuid> EvidenceBundle::uuid_set() const {
    std::set<EvidenceUuid> out;
    for (const auto& r : records) out.insert(r.uuid);
    return out;
}

std::string EvidenceBundle::render_text() const {
    std::string out;
    for (const auto& r : records) {
        out += "--- evidence record " + r.uuid.to_string() + " ---\n";
        out += canonical_dump(r.to_json());
    }
    return out;
}

EvidenceBundle assemble_evidence(const std::vector<ExtractionRecord>& records, long token_budget,
                                 std::uint64_t seed) {
    if (token_budget <= 0) throw ValidationError("evidence token budget must be positive");

    std::vector<const ExtractionRecord*> relevant;
    for (const auto& r : records) {
        if (r.relevant) relevant.push_back(&r);
    }

    std::vector<long> costs(relevant.size());
    long total = 0;
    for (std::size_t i = 0; i < relevant.size(); ++i) {
        costs[i] = estimate_tokens(canonical_dump(relevant[i]->to_json()));
        total += costs[i];
    }

    EvidenceBundle bundle;
    std::vector<std::size_t> keep;
    if (total <= token_budget) {
        keep.resize(relevant.size());
        for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
        bundle.token_estimate = total;
    } else {
        std::vector<std::size_t> order(relevant.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(derive_seed(seed, "evidence-subsample"));
        rng.shuffle(order);
        long remaining = token_budget;
        for (std::size_t idx : order) {
            if (costs[idx] <= remaining) {
                keep.push_back(idx);
                remaining -= costs[idx];
            }
        }
        std::sort(keep.begin(), keep.end());  // order preserved
        bundle.subsample_seed = seed;
        for (std::size_t idx : keep) bundle.token_estimate += costs[idx];
    }

    for (std::size_t idx : keep) bundle.records.push_back(*relevant[idx]);

    json digest_input = json::array();
    for (const auto& r : bundle.records) digest_input.push_back(json_digest(r.to_json()));
    bundle.digest = json_digest(digest_input);
    return bundle;
}

std::vector<Theory> synthesize_theories(Gateway& gateway, const TheoryQuery& query,
                                        const EvidenceBundle& bundle,
                                        const GenerationCondition& condition,
                                        const SynthesisOptions& options,
                                        TheoryIdAllocator& ids) {
    query.validate();
    if (condition.knowledge == KnowledgeSource::literature && bundle.records.empty()) {
        throw ValidationError("literature-supported synthesis requires a non-empty bundle");
    }
    if (condition.knowledge == KnowledgeSource::parametric && !bundle.records.empty()) {
        throw ValidationError("parametric synthesis requires an empty bundle");
    }

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::synthesize_theories;
    request.variables["query_text"] = query.text;
    request.variables["knowledge"] = std::string(to_string(condition.knowledge));
    request.variables["objective"] = std::string(to_string(condition.objective));
    request.variables["theories_requested"] = std::to_string(options.theories_per_query);
    request.variables["evidence_text"] =
        bundle.records.empty() ? "(none: rely on parametric knowledge)" : bundle.render_text();
    request.temperature = condition.objective == Objective::accuracy ? 0.0 : 1.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"theories"};
    // per-knowledge stage names keep generation costs attributable in the report
    request.stage = "synthesis-" + std::string(to_string(condition.knowledge));

    ChatResponse response;
    try {
        response = gateway.chat(request);
    } catch (const ContractViolation& e) {
        throw StageError("synthesis", e.what());
    }

    auto available = bundle.uuid_set();
    std::vector<Theory> theories;
    for (const auto& tj : parse_json(response.text)["theories"]) {
        Theory t;
        t.id = ids.next();
        JsonReader r(tj, "Theory draft");
        t.name = r.string_or("name", "");
        t.description = r.string_or("description", "");
        for (const auto& lj : r.require("laws")) t.laws.push_back(Law::from_json(lj));
        t.condition = condition;
        t.provenance = {query.id, bundle.digest, options.generation_seed};
        t.validate();
        for (const auto& law : t.laws) {
            for (const auto& u : law.all_uuids()) {
                if (!available.count(u)) {
                    throw StageError("synthesis", "generated law cites uuid " + u.to_string() +
                                                      " outside the evidence bundle");
                }
            }
        }
        theories.push_back(std::move(t));
    }
    return theories;
}

Theory reflect(Gateway& gateway, const Theory& theory,
               const std::set<EvidenceUuid>& bundle_uuids) {
    theory.validate();

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::reflect_theory;
    request.variables["theory_json"] = canonical_dump(theory.to_json());
    std::string uuid_list;
    for (const auto& u : bundle_uuids) uuid_list += u.to_string() + " ";
    request.variables["available_uuids"] = uuid_list.empty() ? "(none)" : uuid_list;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"theory"};
    request.stage = "reflection-" + std::string(to_string(theory.condition.knowledge));

    try {
        ChatResponse response = gateway.chat(request);
        json j = parse_json(response.text)["theory"];
        Theory reflected = Theory::from_json(j);
        // identity is not up for revision
        reflected.id = theory.id;
        reflected.condition = theory.condition;
        reflected.provenance = theory.provenance;
        for (const auto& law : reflected.laws) {
            for (const auto& u : law.all_uuids()) {
                if (!bundle_uuids.count(u)) {
                    log_warn("reflection of " + theory.id + " cited uuid " + u.to_string() +
                             " outside the bundle; keeping pre-reflection theory");
                    return theory;
                }
            }
        }
        if (reflected.laws.size() != theory.laws.size()) {
            log_info("reflection changed law count of " + theory.id + ": " +
                     std::to_string(theory.laws.size()) + " -> " +
                     std::to_string(reflected.laws.size()));
        }
        return reflected;
    } catch (const ValidationError& e) {
        log_warn("reflection of " + theory.id + " produced an invalid theory (" + e.what() +
                 "); keeping pre-reflection theory");
        return theory;
    } catch (const ContractViolation& e) {
        log_warn("reflection of " + theory.id + " failed its contract (" + std::string(e.what()) +
                 "); keeping pre-reflection theory");
        return theory;
    }
}

SelfNoveltyFilterResult filter_laws_by_self_novelty(const std::vector<Theory>& theories) {
    SelfNoveltyFilterResult result;
    for (const auto& t : theories) {
        for (std::size_t i = 0; i < t.laws.size(); ++i) {
            LawRef ref{t.id, i, t.condition, t.laws[i]};
            auto label = t.laws[i].self_novelty.classification;
            if (label == SelfNoveltyLabel::closely_related || label == SelfNoveltyLabel::existing) {
                result.filtered.push_back(std::move(ref));
            } else {
                result.kept.push_back(std::move(ref));
            }
        }
    }
    std::size_t total = result.kept.size() + result.filtered.size();
    result.filtered_fraction =
        total == 0 ? 0.0 : static_cast<double>(result.filtered.size()) / static_cast<double>(total);
    return result;
}

}  // namespace theorygen
