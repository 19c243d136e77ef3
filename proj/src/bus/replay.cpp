#include "cobot/bus/replay.hpp"

#include <chrono>
#include <thread>

#include "cobot/error.hpp"

namespace cobot::bus {

std::size_t replay(const SessionLog& log, const ReplayOptions& options,
                   const std::function<void(const BusMessage&)>& emit) {
    if (options.strict && log.header.config_digest != options.config_digest) {
        throw Error("E_CONFIG_MISMATCH", "log config digest " + log.header.config_digest +
                                             " does not match current config " + options.config_digest);
    }
    if (options.speed && !(*options.speed > 0.0)) {
        throw Error("E_USAGE", "replay speed must be positive");
    }
    if (log.messages.empty()) {
        return 0;
    }

    using clock = std::chrono::steady_clock;
    const auto origin = clock::now();
    const std::int64_t first_stamp = log.messages.front().stamp_us;
    for (const auto& msg : log.messages) {
        if (options.speed) {
            const double offset_us = static_cast<double>(msg.stamp_us - first_stamp) / *options.speed;
            std::this_thread::sleep_until(origin + std::chrono::microseconds(static_cast<std::int64_t>(offset_us)));
        }
        emit(msg);
    }
    return log.messages.size();
}

std::size_t replay_into(const SessionLog& log, Broker& broker, const ReplayOptions& options) {
    return replay(log, options, [&broker](const BusMessage& msg) {
        if (broker.clock_mode() == ClockMode::Virtual) {
            broker.advance_to(msg.stamp_us);
        }
        broker.publish(0, msg.topic, msg.data);
        broker.pump();
    });
}

} // namespace cobot::bus
