#include "topomap/log.hpp"

#include <atomic>
#include <iostream>

#include "topomap/errors.hpp"

namespace topomap {

namespace {
std::atomic<LogLevel> g_level{LogLevel::Warn};
}

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

LogLevel parse_log_level(const std::string& name) {
  if (name == "debug") return LogLevel::Debug;
  if (name == "info") return LogLevel::Info;
  if (name == "warn") return LogLevel::Warn;
  if (name == "error") return LogLevel::Error;
  if (name == "off") return LogLevel::Off;
  throw ParameterError("unknown log level '" + name + "'");
}

void log_message(LogLevel level, const std::string& msg) {
  if (level < g_level.load()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace topomap
