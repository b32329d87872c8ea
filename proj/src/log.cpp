#include "cmpg/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "cmpg/errors.hpp"

namespace cmpg::log {
namespace {
std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

Level parse_level(std::string_view name) {
  if (name == "debug") return Level::debug;
  if (name == "info") return Level::info;
  if (name == "warn" || name == "warning") return Level::warn;
  if (name == "error") return Level::error;
  if (name == "off") return Level::off;
  throw ConfigError("unknown log level '" + std::string(name) + "'");
}

void write(Level lvl, const std::string& message) {
  static const char* names[] = {"debug", "info", "warn", "error", "off"};
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << message << '\n';
}

}  // namespace cmpg::log
