#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "cobot/bus/session_log.hpp"

namespace cobot::harness {

struct VerifyReport {
    std::size_t messages = 0;
    std::map<std::string, std::uint64_t> topics; ///< topic -> last seq
    std::string digest;
    std::string replay_digest;
    std::string config_digest;

    bool consistent() const { return digest == replay_digest; }
};

/// Checks that every topic's seqs run 1, 2, 3... and stamps never go back,
/// then replays the log into a fresh virtual-clock broker and digests both.
/// Throws E_LOG_CORRUPT naming the topic and message index of the first defect.
VerifyReport verify_log(const bus::SessionLog& log);

nlohmann::json to_json(const VerifyReport& r);

} // namespace cobot::harness
