#pragma once

#include <sstream>
#include <string_view>

namespace scsl::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity comes from SCSL_LOG (error|warn|info|debug); default warn.
Level threshold();
void set_threshold(Level level);
void write(Level level, std::string_view message);

template <typename... Args>
void emit(Level level, const Args&... args) {
  if (level > threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args>
void warn(const Args&... args) {
  emit(Level::warn, args...);
}

template <typename... Args>
void info(const Args&... args) {
  emit(Level::info, args...);
}

template <typename... Args>
void debug(const Args&... args) {
  emit(Level::debug, args...);
}

}  // namespace scsl::log
