#pragma once

#include <cstdio>
#include <string>

namespace theorygen {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

/// Minimal stderr logger. Level is process-global; the pipeline only logs
/// stage progress and warnings, never record content.
namespace logging {

LogLevel level();
void set_level(LogLevel lvl);
void write(LogLevel lvl, const std::string& message);

}  // namespace logging

inline void log_debug(const std::string& m) { logging::write(LogLevel::debug, m); }
inline void log_info(const std::string& m) { logging::write(LogLevel::info, m); }
inline void log_warn(const std::string& m) { logging::write(LogLevel::warn, m); }
inline void log_error(const std::string& m) { logging::write(LogLevel::error, m); }

}  // namespace theorygen
