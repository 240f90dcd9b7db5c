#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Malformed external input (URLs, timestamps, data files).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration; maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cascade
