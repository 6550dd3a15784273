#pragma once

#include <atomic>
#include <optional>

#include "theorygen/core/types.hpp"
#include "theorygen/gateway/gateway.hpp"

namespace theorygen {

struct SchemaSlot {
    std::string name;  // lowercase, underscore-separated
    std::string description;

    json to_json() const;
    static SchemaSlot from_json(const json& j);
};

struct ExtractionSchema {
    std::string id;  // "extraction-schema-<n>"
    std::string extraction_query;
    std::vector<SchemaSlot> slots;  // ordered, >= 3, unique names
    std::string generator_model_id;
    json extra = json::object();

    void validate() const;
    json to_json() const;
    static ExtractionSchema from_json(const json& j);

    /// "name: description" lines, in slot order (prompt rendering form).
    std::string slots_text() const;
    bool has_slot(const std::string& name) const;
};

struct ExtractionHeader {
    std::string source_info;
    std::string name_short;
    std::string name_full;
    std::string brief_description;
    std::string citation_title;
    std::string mention_or_use;  // "mention" | "use"

    json to_json() const;
    static ExtractionHeader from_json(const json& j);
};

/// One structured evidence mention. Mentions extracted from the same paper
/// share a record number <n> and increment the mention index <k>, giving
/// uuids e<n>.0, e<n>.1, ... The record number is a run-global counter
/// assigned when the paper's extraction is materialized.
struct ExtractionRecord {
    std::string id;  // "extraction-result-<n>"
    EvidenceUuid uuid;
    ExtractionHeader header;
    /// Slot name -> value; nullopt where the paper is silent. Every schema
    /// slot appears; unknown slots are rejected.
    std::map<std::string, std::optional<std::string>> slot_values;
    bool relevant = true;
    json extra = json::object();

    void validate(const ExtractionSchema& schema) const;
    json to_json() const;
    static ExtractionRecord from_json(const json& j);
};

/// Run-global record numbering. Allocation is the only serialized step of
/// extraction; everything else can run per-paper in parallel.
class RecordNumberAllocator {
public:
    explicit RecordNumberAllocator(std::uint64_t first = 1) : next_(first) {}
    std::uint64_t next() { return next_.fetch_add(1); }

private:
    std::atomic<std::uint64_t> next_;
};

/// Generates a query-tailored extraction schema. Persist it before extraction
/// begins (the harness owns that ordering). Throws StageError when the model
/// cannot produce a valid schema after the contract reprompt.
ExtractionSchema generate_schema(Gateway& gateway, const TheoryQuery& query,
                                 const std::string& schema_id);

struct ExtractionOptions {
    /// Papers longer than this are chunked; per-chunk extractions are merged
    /// by a final model pass.
    std::size_t chunk_chars = 120000;
};

/// Populates the schema from one paper. Empty full text yields zero records
/// (logged, not an error).
std::vector<ExtractionRecord> extract_evidence(Gateway& gateway, const PaperRecord& paper,
                                               const ExtractionSchema& schema,
                                               RecordNumberAllocator& allocator,
                                               const ExtractionOptions& options = {});

}  // namespace theorygen
