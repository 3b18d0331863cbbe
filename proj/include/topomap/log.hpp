#pragma once

#include <string>

namespace topomap {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

/// Process-wide threshold; messages below it are dropped. Output goes to stderr.
void set_log_level(LogLevel level);
LogLevel log_level();
/// Parses debug|info|warn|error|off.
LogLevel parse_log_level(const std::string& name);

void log_message(LogLevel level, const std::string& msg);
inline void log_debug(const std::string& msg) { log_message(LogLevel::Debug, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::Warn, msg); }

}  // namespace topomap
