#include "theorygen/querygen/querygen.hpp"

namespace theorygen {

namespace {
constexpr const char* kQueryPrefix = "Build a theory of";
}

void QueryPair::validate() const {
    general.validate();
    specific.validate();
    if (general.kind != QueryKind::general || specific.kind != QueryKind::specific) {
        throw ValidationError("query pair kinds are swapped");
    }
    if (!general.source_paper_id || !specific.source_paper_id ||
        *general.source_paper_id != source_paper_id ||
        *specific.source_paper_id != source_paper_id) {
        throw ValidationError("both queries must share the pair's source paper");
    }
    if (general.text.rfind(kQueryPrefix, 0) != 0 || specific.text.rfind(kQueryPrefix, 0) != 0) {
        throw ValidationError("theory queries must begin with \"Build a theory of\"");
    }
}

json QueryPair::to_json() const {
    json j;
    j["general"] = general.to_json();
    j["specific"] = specific.to_json();
    j["source_paper_id"] = source_paper_id;
    return j;
}

QueryPair QueryPair::from_json(const json& j) {
    JsonReader r(j, "QueryPair");
    QueryPair p;
    p.general = TheoryQuery::from_json(r.require("general"));
    p.specific = TheoryQuery::from_json(r.require("specific"));
    p.source_paper_id = r.require_string("source_paper_id");
    p.validate();
    return p;
}

QueryPair generate_queries(Gateway& gateway, const PaperRecord& paper,
                           const std::string& query_id_prefix) {
    if (paper.full_text.empty() && paper.title.empty()) {
        throw ValidationError("query generation needs the paper's text or title");
    }

    ChatRequest request;
    request.prompt_asset_id = prompt_assets::generate_queries;
    request.variables["paper_title"] = paper.title;
    request.variables["paper_text"] = paper.full_text;
    request.variables["paper_id"] = paper.paper_id;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"general", "specific"};
    request.stage = "query-gen";

    json j = parse_json(gateway.chat(request).text);

    QueryPair pair;
    pair.source_paper_id = paper.paper_id;
    pair.general.id = query_id_prefix + "-general";
    pair.general.text = j["general"].get<std::string>();
    pair.general.kind = QueryKind::general;
    pair.general.source_paper_id = paper.paper_id;
    pair.specific.id = query_id_prefix + "-specific";
    pair.specific.text = j["specific"].get<std::string>();
    pair.specific.kind = QueryKind::specific;
    pair.specific.source_paper_id = paper.paper_id;

    try {
        pair.validate();
    } catch (const ValidationError& e) {
        // hard template constraint: treat a bad pair like a contract violation
        throw ContractViolation(std::string("query generation for ") + paper.paper_id + ": " +
                                e.what());
    }
    return pair;
}

std::vector<PaperRecord> filter_seed_papers(const std::vector<PaperRecord>& papers,
                                            const Date& model_cutoff) {
    DateRange window{model_cutoff.minus_months(12), model_cutoff};
    std::vector<PaperRecord> out;
    for (const auto& p : papers) {
        if (window.contains(p.publication_date)) out.push_back(p);
    }
    return out;
}

}  // namespace theorygen
