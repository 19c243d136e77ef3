#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace cobot::bus {

using Json = nlohmann::json;

struct BusMessage {
    std::string topic;
    std::uint64_t seq = 0;
    std::int64_t stamp_us = 0;
    Json data = Json::object();

    bool operator==(const BusMessage&) const = default;
};

/// Returns the violated rule when `topic` is not of the form
/// `[a-z0-9_]+(/[a-z0-9_]+)*`, nothing otherwise.
std::optional<std::string> topic_violation(std::string_view topic);

inline bool is_valid_topic(std::string_view topic) { return !topic_violation(topic); }

/// Subscription patterns are either an exact topic or a topic followed by a
/// trailing "/*", which matches every topic strictly below that prefix.
std::optional<std::string> pattern_violation(std::string_view pattern);

bool pattern_matches(std::string_view pattern, std::string_view topic);

Json to_json(const BusMessage& msg);
BusMessage message_from_json(const Json& j);

/// Canonical single-line serialization used by logs and digests.
std::string canonical_line(const BusMessage& msg);

} // namespace cobot::bus
