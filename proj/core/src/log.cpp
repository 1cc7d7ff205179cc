#include "conman/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>

#include "conman/error.hpp"
#include "conman/normalize.hpp"
#include "conman/time.hpp"

namespace conman::log {
namespace {

std::atomic<Level> g_level{Level::Info};
std::mutex g_mu;

std::string_view name(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: return "off";
  }
  return "info";
}

}  // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

Level parse_level(std::string_view s) {
  const auto l = to_lower(s);
  for (auto v : {Level::Debug, Level::Info, Level::Warn, Level::Error, Level::Off}) {
    if (name(v) == l) return v;
  }
  throw ConfigError("unknown log level '" + std::string(s) + "'");
}

void emit(Level l, std::string_view event, const nlohmann::json& fields) {
  if (l < g_level.load() || g_level.load() == Level::Off) return;
  const auto now = std::chrono::system_clock::now();
  nlohmann::json j = {{"ts", to_iso8601(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count())},
                      {"level", name(l)},
                      {"event", event}};
  if (fields.is_object()) {
    for (const auto& [k, v] : fields.items()) j[k] = v;
  }
  const auto line = j.dump() + "\n";
  std::lock_guard lock(g_mu);
  std::fputs(line.c_str(), stderr);
}

}  // namespace conman::log
