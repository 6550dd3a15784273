#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace theorygen {

/// Response cache keyed by request digest. Memory-backed, with optional disk
/// persistence (one file per key under the cache directory). Reads are
/// concurrent-safe; writes are serialized.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value);

    bool persistent() const { return !dir_.empty(); }

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::string> memory_;
};

}  // namespace theorygen
