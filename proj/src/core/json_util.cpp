#include "theorygen/core/json_util.hpp"

#include "theorygen/core/digest.hpp"

namespace theorygen {

std::string canonical_dump(const json& j) {
    return j.dump(2) + "\n";
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

std::string json_digest(const json& j) {
    return sha256_hex(canonical_dump(j));
}

JsonReader::JsonReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) {
        throw ValidationError(context_ + ": expected a JSON object, got " + std::string(j_.type_name()));
    }
}

const json& JsonReader::require(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) {
        throw ValidationError(context_ + ": missing required field '" + key + "'");
    }
    consumed_.insert(key);
    return *it;
}

const json* JsonReader::find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    consumed_.insert(key);
    if (it->is_null()) return nullptr;
    return &*it;
}

std::string JsonReader::require_string(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) {
        throw ValidationError(context_ + ": field '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::string JsonReader::string_or(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) {
        throw ValidationError(context_ + ": field '" + key + "' must be a string");
    }
    return v->get<std::string>();
}

json JsonReader::take_extra() const {
    json extra = json::object();
    for (auto it = j_.begin(); it != j_.end(); ++it) {
        if (!consumed_.count(it.key())) extra[it.key()] = it.value();
    }
    return extra;
}

}  // namespace theorygen
