#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace dicore {

// Log level comes from the DICORE_LOG environment variable:
// error, warn (default), info, debug.
enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level() {
  static const LogLevel lv = [] {
    const char* e = std::getenv("DICORE_LOG");
    if (!e) return LogLevel::Warn;
    if (std::strcmp(e, "error") == 0) return LogLevel::Error;
    if (std::strcmp(e, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(e, "info") == 0) return LogLevel::Info;
    if (std::strcmp(e, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return lv;
}

inline void log_msg(LogLevel lv, const std::string& msg) {
  if (lv > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(lv)], msg.c_str());
}

inline void log_error(const std::string& m) { log_msg(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_msg(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_msg(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_msg(LogLevel::Debug, m); }

}
