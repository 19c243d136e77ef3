#include "cobot/harness/verify.hpp"

#include "cobot/bus/broker.hpp"
#include "cobot/bus/replay.hpp"
#include "cobot/error.hpp"

namespace cobot::harness {

VerifyReport verify_log(const bus::SessionLog& log) {
    VerifyReport r;
    r.messages = log.messages.size();
    r.config_digest = log.header.config_digest;
    std::int64_t last_stamp = log.header.start_stamp_us;
    for (std::size_t i = 0; i < log.messages.size(); ++i) {
        const auto& m = log.messages[i];
        auto& seq = r.topics[m.topic];
        if (m.seq != seq + 1) {
            throw Error("E_LOG_CORRUPT", "seq gap on topic '" + m.topic + "' at message index " + std::to_string(i) +
                                             ": expected " + std::to_string(seq + 1) + ", found " +
                                             std::to_string(m.seq));
        }
        if (m.stamp_us < last_stamp) {
            throw Error("E_LOG_CORRUPT", "stamp goes backwards on topic '" + m.topic + "' at message index " +
                                             std::to_string(i));
        }
        seq = m.seq;
        last_stamp = m.stamp_us;
    }
    r.digest = bus::log_digest(log.messages);

    bus::Broker fresh({bus::ClockMode::Virtual, log.header.config_digest, true});
    fresh.advance_to(log.header.start_stamp_us);
    bus::replay_into(log, fresh, {});
    r.replay_digest = bus::log_digest(fresh.log().messages);
    return r;
}

nlohmann::json to_json(const VerifyReport& r) {
    return {{"messages", r.messages},
            {"topics", r.topics},
            {"digest", r.digest},
            {"replay_digest", r.replay_digest},
            {"config_digest", r.config_digest},
            {"consistent", r.consistent()}};
}

} // namespace cobot::harness
