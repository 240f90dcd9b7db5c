#include "cascade/logging.hpp"

#include "cascade/errors.hpp"

#include <atomic>
#include <iostream>

namespace cascade::logging {

namespace {
std::atomic<Level> g_level{Level::Info};

const char* tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
    }
    return "?";
}
} // namespace

void set_level(Level level) { g_level.store(level); }

Level level() { return g_level.load(); }

Level level_from_string(std::string_view name) {
    if (name == "debug") return Level::Debug;
    if (name == "info") return Level::Info;
    if (name == "warn" || name == "warning") return Level::Warn;
    if (name == "error") return Level::Error;
    throw ConfigError("unknown log level '" + std::string(name) +
                      "' (expected debug|info|warn|error)");
}

void log(Level level, const std::string& message) {
    if (level < g_level.load()) return;
    std::cerr << "[" << tag(level) << "] " << message << "\n";
}

} // namespace cascade::logging
