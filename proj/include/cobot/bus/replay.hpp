#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cobot/bus/broker.hpp"
#include "cobot/bus/session_log.hpp"

namespace cobot::bus {

struct ReplayOptions {
    /// Playback speed relative to recorded time; nullopt plays as fast as possible.
    std::optional<double> speed;
    /// When set, the log header digest must equal `config_digest`.
    bool strict = false;
    std::string config_digest;
};

/// Emits the log's messages in order, pacing them by their recorded stamp gaps
/// divided by `speed` (real sleeping) unless playing as fast as possible.
std::size_t replay(const SessionLog& log, const ReplayOptions& options,
                   const std::function<void(const BusMessage&)>& emit);

/// Re-publishes every message into `broker` with its original topic and
/// payload. On a virtual-clock broker the clock is advanced to each recorded
/// stamp first, so a fresh broker reproduces the original log exactly.
std::size_t replay_into(const SessionLog& log, Broker& broker, const ReplayOptions& options);

} // namespace cobot::bus
