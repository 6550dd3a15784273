#include "theorygen/gateway/cache.hpp"

#include <fstream>
#include <sstream>

namespace theorygen {

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return dir_ / (key + ".cache");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = memory_.find(key);
        if (it != memory_.end()) return it->second;
    }
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string value = buf.str();
    std::lock_guard<std::mutex> lock(mutex_);
    memory_[key] = value;
    return value;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_[key] = value;
    if (!dir_.empty()) {
        std::ofstream out(path_for(key), std::ios::binary | std::ios::trunc);
        out << value;
    }
}

}  // namespace theorygen
