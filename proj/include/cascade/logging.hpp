#pragma once

#include <string>
#include <string_view>

namespace cascade::logging {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

void set_level(Level level);
Level level();
Level level_from_string(std::string_view name); // throws ConfigError on unknown name

void log(Level level, const std::string& message);

inline void debug(const std::string& m) { log(Level::Debug, m); }
inline void info(const std::string& m) { log(Level::Info, m); }
inline void warn(const std::string& m) { log(Level::Warn, m); }
inline void error(const std::string& m) { log(Level::Error, m); }

} // namespace cascade::logging
