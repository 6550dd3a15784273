#include "theorygen/core/log.hpp"

#include <atomic>
#include <mutex>

namespace theorygen::logging {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_mutex;

const char* tag(LogLevel lvl) {
    switch (lvl) {
        case LogLevel::debug: return "debug";
        case LogLevel::info: return "info";
        case LogLevel::warn: return "warn";
        case LogLevel::error: return "error";
    }
    return "?";
}
}  // namespace

LogLevel level() { return g_level.load(); }

void set_level(LogLevel lvl) { g_level.store(lvl); }

void write(LogLevel lvl, const std::string& message) {
    if (lvl < g_level.load()) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[%s] %s\n", tag(lvl), message.c_str());
}

}  // namespace theorygen::logging
