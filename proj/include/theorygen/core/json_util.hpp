#pragma once

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "theorygen/core/errors.hpp"

namespace theorygen {

using json = nlohmann::json;

/// Canonical text form: sorted object keys (nlohmann's default storage order),
/// two-space indent, trailing newline. Digests are taken over this form, so a
/// record's digest is invariant under key reordering of the input text.
std::string canonical_dump(const json& j);

/// Parse that converts nlohmann's exceptions into ParseError with the byte offset.
json parse_json(const std::string& text);

std::string json_digest(const json& j);

/// Pulls known keys out of a JSON object and collects whatever is left into
/// `extra`, so unknown fields survive a round-trip verbatim.
class JsonReader {
public:
    explicit JsonReader(const json& j, std::string context = {});

    const json& require(const std::string& key);
    const json* find(const std::string& key);  // nullptr when absent or null

    std::string require_string(const std::string& key);
    std::string string_or(const std::string& key, const std::string& fallback);

    /// Unconsumed fields, as an object ({} when none).
    json take_extra() const;

private:
    const json& j_;
    std::string context_;
    std::set<std::string> consumed_;
};

}  // namespace theorygen
