#include "theorygen/discovery/discovery.hpp"

#include <algorithm>
#include <set>

#include "theorygen/core/log.hpp"
#include "theorygen/core/text.hpp"

namespace theorygen {

void RetrievalPlan::validate() const {
    if (search_query.empty()) throw ValidationError("retrieval plan needs a search query");
    if (target_size < 1) throw ValidationError("retrieval target size must be >= 1");
}

std::string reformulate_query(Gateway& gateway, const TheoryQuery& query) {
    query.validate();
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::reformulate_query;
    request.variables["query_text"] = query.text;
    request.temperature = 0.0;
    request.stage = "discovery";
    ChatResponse response = gateway.chat(request);
    std::string search_query = trim(response.text);
    if (search_query.empty()) {
        throw StageError("discovery", "query reformulation produced an empty search query for '" +
                                          query.id + "'");
    }
    return search_query;
}

std::vector<ScoredCandidate> rank_backfill_candidates(std::vector<ScoredCandidate> candidates,
                                                      const std::string& search_query) {
    for (auto& c : candidates) {
        if (!c.provider_scored) {
            c.score = lexical_overlap(search_query, c.paper.title + " " + c.paper.venue);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ScoredCandidate& a, const ScoredCandidate& b) {
                         if (a.score != b.score) return a.score > b.score;
                         if (a.paper.publication_date != b.paper.publication_date) {
                             return b.paper.publication_date < a.paper.publication_date;
                         }
                         return a.paper.paper_id < b.paper.paper_id;
                     });
    return candidates;
}

namespace {

double take_relevance(PaperRecord& paper) {
    double score = 0.0;
    if (paper.extra.contains("relevance_score")) {
        score = paper.extra["relevance_score"].get<double>();
        paper.extra.erase("relevance_score");
    }
    return score;
}

/// References cited by a retrieved paper, mined via a structured gateway call.
std::vector<std::string> mine_references(Gateway& gateway, const PaperRecord& paper) {
    if (paper.full_text.empty()) return {};
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::mine_references;
    request.variables["paper_id"] = paper.paper_id;
    request.variables["paper_text"] = paper.full_text;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"references"};
    request.stage = "discovery";
    json j = parse_json(gateway.chat(request).text);
    std::vector<std::string> out;
    for (const auto& e : j["references"]) {
        if (e.is_string()) out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

Corpus discover_corpus(Gateway& gateway, const RetrievalPlan& plan, const std::string& query_id) {
    plan.validate();

    Corpus corpus;
    corpus.query_id = query_id;
    corpus.target_size = plan.target_size;

    auto direct = gateway.search_papers(plan.search_query, plan.date_filter, plan.target_size);
    std::set<std::string> in_corpus;
    for (auto& stub : direct) {
        if (!in_corpus.insert(stub.paper_id).second) continue;
        double relevance = take_relevance(stub);
        PaperRecord paper = stub;
        if (auto text = gateway.fetch_full_text(paper.paper_id)) paper.full_text = *text;
        corpus.retrieval_notes.push_back({paper.paper_id, RetrievalSource::direct_search,
                                          relevance, "query: " + plan.search_query});
        corpus.papers.push_back(std::move(paper));
    }

    if (static_cast<int>(corpus.papers.size()) < plan.target_size) {
        // one backfill hop: mine references from retrieved texts, rank, top up
        std::vector<ScoredCandidate> candidates;
        std::set<std::string> seen = in_corpus;
        for (const auto& paper : corpus.papers) {
            for (const auto& ref_id : mine_references(gateway, paper)) {
                if (!seen.insert(ref_id).second) continue;
                auto stub = gateway.lookup_paper(ref_id);
                if (!stub) continue;
                if (!plan.date_filter.contains(stub->publication_date)) continue;
                ScoredCandidate c;
                c.score = take_relevance(*stub);
                c.provider_scored = c.score > 0.0;
                c.paper = std::move(*stub);
                candidates.push_back(std::move(c));
            }
        }
        candidates = rank_backfill_candidates(std::move(candidates), plan.search_query);
        for (auto& c : candidates) {
            if (static_cast<int>(corpus.papers.size()) >= plan.target_size) break;
            PaperRecord paper = c.paper;
            if (auto text = gateway.fetch_full_text(paper.paper_id)) paper.full_text = *text;
            corpus.retrieval_notes.push_back({paper.paper_id, RetrievalSource::backfill, c.score,
                                              "mined from retrieved full texts"});
            corpus.papers.push_back(std::move(paper));
        }
    }

    if (corpus.papers.empty()) {
        corpus.empty_warning = true;
        log_warn("discovery found no papers for query '" + query_id + "'");
    }
    corpus.validate();
    return corpus;
}

}  // namespace theorygen
