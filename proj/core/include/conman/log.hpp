#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace conman::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level l);
Level level();
Level parse_level(std::string_view s);

// One JSON object per line on stderr: {"ts", "level", "event", ...fields}.
void emit(Level l, std::string_view event, const nlohmann::json& fields = nlohmann::json::object());

inline void debug(std::string_view e, const nlohmann::json& f = nlohmann::json::object()) { emit(Level::Debug, e, f); }
inline void info(std::string_view e, const nlohmann::json& f = nlohmann::json::object()) { emit(Level::Info, e, f); }
inline void warn(std::string_view e, const nlohmann::json& f = nlohmann::json::object()) { emit(Level::Warn, e, f); }
inline void error(std::string_view e, const nlohmann::json& f = nlohmann::json::object()) { emit(Level::Error, e, f); }

}  // namespace conman::log
