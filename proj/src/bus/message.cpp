#include "cobot/bus/message.hpp"

#include "cobot/error.hpp"

namespace cobot::bus {

namespace {

bool is_topic_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

} // namespace

std::optional<std::string> topic_violation(std::string_view topic) {
    if (topic.empty()) {
        return "topic must not be empty";
    }
    if (topic.front() == '/' || topic.back() == '/') {
        return "topic must not start or end with '/'";
    }
    char prev = '\0';
    for (char c : topic) {
        if (c == '/') {
            if (prev == '/') {
                return "topic segments must be non-empty";
            }
        } else if (!is_topic_char(c)) {
            return std::string("topic segments may only contain [a-z0-9_], found '") + c + "'";
        }
        prev = c;
    }
    return std::nullopt;
}

std::optional<std::string> pattern_violation(std::string_view pattern) {
    if (pattern.size() >= 2 && pattern.substr(pattern.size() - 2) == "/*") {
        return topic_violation(pattern.substr(0, pattern.size() - 2));
    }
    if (pattern.find('*') != std::string_view::npos) {
        return "wildcard '*' is only allowed as a trailing '/*'";
    }
    return topic_violation(pattern);
}

bool pattern_matches(std::string_view pattern, std::string_view topic) {
    if (pattern.size() >= 2 && pattern.substr(pattern.size() - 2) == "/*") {
        const auto prefix = pattern.substr(0, pattern.size() - 1); // keeps the '/'
        return topic.size() > prefix.size() && topic.substr(0, prefix.size()) == prefix;
    }
    return pattern == topic;
}

Json to_json(const BusMessage& msg) {
    return Json{{"topic", msg.topic}, {"seq", msg.seq}, {"stamp_us", msg.stamp_us}, {"data", msg.data}};
}

BusMessage message_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("topic") || !j.contains("seq") || !j.contains("stamp_us")) {
        throw Error("E_MALFORMED_MESSAGE", "message requires topic, seq and stamp_us");
    }
    BusMessage msg;
    msg.topic = j.at("topic").get<std::string>();
    msg.seq = j.at("seq").get<std::uint64_t>();
    msg.stamp_us = j.at("stamp_us").get<std::int64_t>();
    msg.data = j.value("data", Json::object());
    return msg;
}

std::string canonical_line(const BusMessage& msg) {
    return to_json(msg).dump();
}

} // namespace cobot::bus
