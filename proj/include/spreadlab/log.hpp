#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

namespace spreadlab {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

/// Level comes from SPREADLAB_LOG (debug|info|warn|error); defaults to warn.
inline LogLevel log_threshold() {
  static LogLevel level = [] {
    const char* env = std::getenv("SPREADLAB_LOG");
    if (!env) return LogLevel::Warn;
    std::string_view v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    if (v == "error") return LogLevel::Error;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_message(LogLevel level, const std::string& msg) {
  if (level < log_threshold()) return;
  const char* tag = level == LogLevel::Debug  ? "debug"
                    : level == LogLevel::Info ? "info"
                    : level == LogLevel::Warn ? "warn"
                                              : "error";
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

inline void log_debug(const std::string& msg) { log_message(LogLevel::Debug, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::Warn, msg); }
inline void log_error(const std::string& msg) { log_message(LogLevel::Error, msg); }

}  // namespace spreadlab
