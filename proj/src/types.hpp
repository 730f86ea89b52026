#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace accnoc {

// Global timeline unit. Integer picoseconds so that 1 GHz (1000 ps) and
// 300 MHz (3333 ps) clocks coexist without float drift.
using TimePs = std::int64_t;

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range wire data (field overflow, bad flags).
struct CodecError : SimError {
    using SimError::SimError;
};

// A simulated agent broke the request/grant protocol; always a bug or a
// bad config, never expected at runtime.
struct ProtocolError : SimError {
    using SimError::SimError;
};

struct ConfigError : SimError {
    using SimError::SimError;
};

} // namespace accnoc
