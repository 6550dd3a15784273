#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "theorygen/gateway/provider.hpp"

namespace theorygen {

/// In-memory paper index backing the mock provider's search/fetch/lookup.
/// Search scores candidates by lexical overlap with the query and orders by
/// (score desc, publication_date desc, paper_id asc); the score travels in the
/// result stub's extra["relevance_score"].
class MockIndex {
public:
    MockIndex() = default;

    static MockIndex load(const std::filesystem::path& file);
    static MockIndex from_json(const json& j);

    void add(PaperRecord paper);

    std::vector<PaperRecord> search(const std::string& query, const DateRange& date_filter,
                                    int result_cap) const;
    std::optional<PaperRecord> lookup(const std::string& paper_id) const;
    std::optional<std::string> full_text(const std::string& paper_id) const;

    std::size_t size() const { return papers_.size(); }
    const std::vector<PaperRecord>& papers() const { return papers_; }

private:
    std::vector<PaperRecord> papers_;
    std::map<std::string, std::size_t> by_id_;
};

/// Scripted response table: maps requests to canned response bodies. An entry
/// matches either on the exact request digest or on (prompt_asset_id + a
/// variable subset, with substring matching); first entry wins. Tables ship
/// with the test fixtures.
class MockScript {
public:
    struct Entry {
        std::string prompt_asset_id;
        std::string request_digest;                         // exact match when non-empty
        std::map<std::string, std::string> variables_contain;  // else substring match per var
        std::string response;
    };

    MockScript() = default;
    static MockScript load(const std::filesystem::path& file);
    static MockScript from_json(const json& j);

    void add(Entry entry);
    const std::string* match(const ChatRequest& request) const;

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<Entry> entries_;
};

struct MockOptions {
    std::uint64_t seed = 0;
    int default_theories_per_call = 3;
};

/// Deterministic offline provider. Chat responses come from the scripted table
/// first; otherwise a per-prompt-asset synthesizer derives a valid response
/// from SplitMix64 streams keyed on (prompt_asset_id, variables digest,
/// temperature, seed), so any call sequence replays byte-identically under a
/// fixed seed. Requests with neither a canned entry nor a synthesizer fail
/// loudly with a permanent error.
///
/// Fixture papers drive the synthesizers through marker lines in their full
/// text: "EVIDENCE: <system name> | <mention|use>" yields one extraction
/// record per line, and "REF: <paper_id>" lines populate reference mining.
class MockProvider : public Provider {
public:
    MockProvider(MockIndex index, MockScript script, MockOptions options);

    ChatResponse chat_once(const std::string& rendered_prompt, const ChatRequest& request,
                           const std::string& model_id) override;
    std::vector<PaperRecord> search_once(const std::string& query, const DateRange& date_filter,
                                         int result_cap) override;
    std::optional<std::string> fetch_once(const std::string& paper_id) override;
    std::optional<PaperRecord> lookup_once(const std::string& paper_id) override;
    std::string name() const override { return "mock"; }

    const MockIndex& index() const { return index_; }

private:
    std::string dispatch(const ChatRequest& request, std::uint64_t key) const;

    MockIndex index_;
    MockScript script_;
    MockOptions options_;
};

/// Evidence uuids ("e<digits>.<digits>") in order of first appearance.
std::vector<EvidenceUuid> scan_evidence_uuids(const std::string& text);

/// "EVIDENCE: name | use" marker lines of a fixture paper text.
struct EvidenceMarker {
    std::string name;
    std::string mention_or_use;
};
std::vector<EvidenceMarker> scan_evidence_markers(const std::string& text);

/// "REF: id" marker lines, deduplicated in order.
std::vector<std::string> scan_reference_markers(const std::string& text);

}  // namespace theorygen
