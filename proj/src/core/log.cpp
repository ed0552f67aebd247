#include "scsl/core/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace scsl::log {
namespace {

Level from_env() {
  const char* env = std::getenv("SCSL_LOG");
  if (env == nullptr) return Level::warn;
  const std::string v(env);
  if (v == "error") return Level::error;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

const char* name(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

void write(Level level, std::string_view message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "[scsl " << name(level) << "] " << message << '\n';
}

}  // namespace scsl::log
