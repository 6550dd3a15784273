#include "theorygen/extraction/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "theorygen/core/log.hpp"

namespace theorygen {

json SchemaSlot::to_json() const {
    json j;
    j["name"] = name;
    j["description"] = description;
    return j;
}

SchemaSlot SchemaSlot::from_json(const json& j) {
    JsonReader r(j, "SchemaSlot");
    SchemaSlot s;
    s.name = r.require_string("name");
    s.description = r.string_or("description", "");
    return s;
}

namespace {

bool valid_slot_name(const std::string& name) {
    if (name.empty()) return false;
    if (!std::islower(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::islower(c) || std::isdigit(c) || c == '_';
    });
}

}  // namespace

void ExtractionSchema::validate() const {
    if (id.empty()) throw ValidationError("extraction schema needs an id");
    if (slots.size() < 3) throw ValidationError("extraction schema needs at least 3 slots");
    std::set<std::string> names;
    for (const auto& s : slots) {
        if (!valid_slot_name(s.name)) {
            throw ValidationError("slot name must be lowercase underscore-separated: '" + s.name +
                                  "'");
        }
        if (!names.insert(s.name).second) {
            throw ValidationError("duplicate slot name in schema: '" + s.name + "'");
        }
    }
}

json ExtractionSchema::to_json() const {
    json j = extra;
    j["id"] = id;
    j["extraction_query"] = extraction_query;
    json slots_j = json::array();
    for (const auto& s : slots) slots_j.push_back(s.to_json());
    j["slots"] = slots_j;
    j["generator_model_id"] = generator_model_id;
    return j;
}

ExtractionSchema ExtractionSchema::from_json(const json& j) {
    JsonReader r(j, "ExtractionSchema");
    ExtractionSchema s;
    s.id = r.require_string("id");
    s.extraction_query = r.require_string("extraction_query");
    for (const auto& e : r.require("slots")) s.slots.push_back(SchemaSlot::from_json(e));
    s.generator_model_id = r.string_or("generator_model_id", "");
    s.extra = r.take_extra();
    s.validate();
    return s;
}

std::string ExtractionSchema::slots_text() const {
    std::string out;
    for (const auto& s : slots) out += s.name + ": " + s.description + "\n";
    return out;
}

bool ExtractionSchema::has_slot(const std::string& name) const {
    return std::any_of(slots.begin(), slots.end(),
                       [&](const SchemaSlot& s) { return s.name == name; });
}

json ExtractionHeader::to_json() const {
    json j;
    j["source_info"] = source_info;
    j["name_short"] = name_short;
    j["name_full"] = name_full;
    j["brief_description"] = brief_description;
    j["citation_title"] = citation_title;
    j["mention_or_use"] = mention_or_use;
    return j;
}

ExtractionHeader ExtractionHeader::from_json(const json& j) {
    JsonReader r(j, "ExtractionHeader");
    ExtractionHeader h;
    h.source_info = r.string_or("source_info", "");
    h.name_short = r.string_or("name_short", "");
    h.name_full = r.string_or("name_full", "");
    h.brief_description = r.string_or("brief_description", "");
    h.citation_title = r.string_or("citation_title", "");
    h.mention_or_use = r.string_or("mention_or_use", "use");
    if (h.mention_or_use != "mention" && h.mention_or_use != "use") {
        throw ValidationError("mention_or_use must be 'mention' or 'use', got '" +
                              h.mention_or_use + "'");
    }
    return h;
}

void ExtractionRecord::validate(const ExtractionSchema& schema) const {
    std::string expected_id = "extraction-result-" + std::to_string(uuid.record);
    if (id != expected_id) {
        throw ValidationError("record id '" + id + "' does not match uuid " + uuid.to_string());
    }
    for (const auto& [slot, _] : slot_values) {
        if (!schema.has_slot(slot)) {
            throw ValidationError("record " + uuid.to_string() + " has unknown slot '" + slot +
                                  "'");
        }
    }
}

json ExtractionRecord::to_json() const {
    json j = extra;
    j["id"] = id;
    j["uuid"] = uuid.to_string();
    j["header"] = header.to_json();
    json values = json::object();
    for (const auto& [slot, value] : slot_values) {
        if (value) {
            values[slot] = *value;
        } else {
            values[slot] = nullptr;
        }
    }
    j["slot_values"] = values;
    j["relevant"] = relevant;
    return j;
}

ExtractionRecord ExtractionRecord::from_json(const json& j) {
    JsonReader r(j, "ExtractionRecord");
    ExtractionRecord rec;
    rec.id = r.require_string("id");
    rec.uuid = EvidenceUuid::parse(r.require_string("uuid"));
    rec.header = ExtractionHeader::from_json(r.require("header"));
    const json& values = r.require("slot_values");
    for (auto it = values.begin(); it != values.end(); ++it) {
        if (it.value().is_null()) {
            rec.slot_values[it.key()] = std::nullopt;
        } else {
            rec.slot_values[it.key()] = it.value().get<std::string>();
        }
    }
    rec.relevant = r.require("relevant").get<bool>();
    rec.extra = r.take_extra();
    return rec;
}

// ---------------------------------------------------------------------------

ExtractionSchema generate_schema(Gateway& gateway, const TheoryQuery& query,
                                 const std::string& schema_id) {
    query.validate();
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::generate_schema;
    request.variables["query_text"] = query.text;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"extraction_query", "slots"};
    request.stage = "extraction";

    ChatResponse response;
    try {
        response = gateway.chat(request);
    } catch (const ContractViolation& e) {
        throw StageError("extraction", e.what());
    }

    json j = parse_json(response.text);
    ExtractionSchema schema;
    schema.id = schema_id;
    schema.extraction_query = j["extraction_query"].get<std::string>();
    for (const auto& e : j["slots"]) schema.slots.push_back(SchemaSlot::from_json(e));
    schema.generator_model_id = response.model_id;
    schema.validate();
    return schema;
}

namespace {

std::vector<std::string> chunk_text(const std::string& text, std::size_t chunk_chars) {
    std::vector<std::string> chunks;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = std::min(pos + chunk_chars, text.size());
        if (end < text.size()) {
            // prefer a paragraph boundary in the back half of the chunk
            std::size_t brk = text.rfind("\n\n", end);
            if (brk != std::string::npos && brk > pos + chunk_chars / 2) end = brk;
        }
        chunks.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    return chunks;
}

json extract_chunk(Gateway& gateway, const PaperRecord& paper, const ExtractionSchema& schema,
                   const std::string& chunk_text) {
    ChatRequest request;
    request.prompt_asset_id = prompt_assets::extract_evidence;
    request.variables["paper_id"] = paper.paper_id;
    request.variables["paper_title"] = paper.title;
    request.variables["paper_text"] = chunk_text;
    request.variables["schema_slots"] = schema.slots_text();
    request.variables["extraction_query"] = schema.extraction_query;
    request.temperature = 0.0;
    request.response_contract = ResponseContract::structured;
    request.required_fields = {"records"};
    request.stage = "extraction";
    return parse_json(gateway.chat(request).text)["records"];
}

}  // namespace

std::vector<ExtractionRecord> extract_evidence(Gateway& gateway, const PaperRecord& paper,
                                               const ExtractionSchema& schema,
                                               RecordNumberAllocator& allocator,
                                               const ExtractionOptions& options) {
    schema.validate();
    if (paper.full_text.empty()) {
        log_info("extraction skipped for " + paper.paper_id + ": no full text");
        return {};
    }

    json records_json;
    if (paper.full_text.size() <= options.chunk_chars) {
        records_json = extract_chunk(gateway, paper, schema, paper.full_text);
    } else {
        json chunks = json::array();
        for (const auto& chunk : chunk_text(paper.full_text, options.chunk_chars)) {
            chunks.push_back(extract_chunk(gateway, paper, schema, chunk));
        }
        ChatRequest merge;
        merge.prompt_asset_id = prompt_assets::merge_extractions;
        merge.variables["paper_id"] = paper.paper_id;
        merge.variables["chunks_json"] = chunks.dump();
        merge.temperature = 0.0;
        merge.response_contract = ResponseContract::structured;
        merge.required_fields = {"records"};
        merge.stage = "extraction";
        records_json = parse_json(gateway.chat(merge).text)["records"];
    }

    if (!records_json.is_array() || records_json.empty()) return {};

    std::uint64_t record_number = allocator.next();
    std::vector<ExtractionRecord> records;
    for (std::size_t k = 0; k < records_json.size(); ++k) {
        const json& rec_j = records_json[k];
        ExtractionRecord rec;
        rec.id = "extraction-result-" + std::to_string(record_number);
        rec.uuid = {record_number, k};  // k-index increments per mention
        rec.header = ExtractionHeader::from_json(rec_j.at("header"));
        json values = rec_j.value("slot_values", json::object());
        for (const auto& slot : schema.slots) {
            auto it = values.find(slot.name);
            if (it == values.end() || it->is_null()) {
                rec.slot_values[slot.name] = std::nullopt;
            } else {
                rec.slot_values[slot.name] = it->get<std::string>();
            }
            if (it != values.end()) values.erase(it);
        }
        if (!values.empty()) {
            throw ValidationError("extraction for " + paper.paper_id +
                                  " produced slots outside the schema: " + values.begin().key());
        }
        rec.relevant = rec_j.value("relevant", true);
        rec.validate(schema);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace theorygen
