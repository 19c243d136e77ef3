#include "cobot/bus/protocol.hpp"

#include "cobot/error.hpp"

namespace cobot::bus {

Json delivery_frame(const BusMessage& msg) {
    return Json{{"op", "pub"},
                {"topic", msg.topic},
                {"seq", msg.seq},
                {"stamp_us", msg.stamp_us},
                {"data", msg.data}};
}

Json error_frame(std::string_view code, std::string_view message) {
    return Json{{"op", "err"}, {"code", code}, {"message", message}};
}

std::vector<Json> handle_frame(Broker& broker, ClientId client, std::string_view text) {
    Json req;
    try {
        req = Json::parse(text);
    } catch (const Json::parse_error& e) {
        return {error_frame("E_MALFORMED_FRAME", std::string("frame is not valid JSON: ") + e.what())};
    }

    auto reply = [&req](Json frame) {
        if (req.is_object() && req.contains("id")) {
            frame["id"] = req["id"];
        }
        return frame;
    };

    if (!req.is_object() || !req.contains("op") || !req["op"].is_string()) {
        return {reply(error_frame("E_MALFORMED_FRAME", "frame must be an object with a string 'op'"))};
    }
    const auto op = req["op"].get<std::string>();
    try {
        if (op == "pub" || op == "sub" || op == "unsub") {
            if (!req.contains("topic") || !req["topic"].is_string()) {
                return {reply(error_frame("E_MALFORMED_FRAME", "'" + op + "' requires a string 'topic'"))};
            }
        }
        if (op == "pub") {
            Json data = req.value("data", Json::object());
            const auto topic = req["topic"].get<std::string>();
            const auto seq = broker.publish(client, topic, std::move(data));
            return {reply(Json{{"op", "ack"}, {"topic", topic}, {"seq", seq}})};
        }
        if (op == "sub") {
            broker.subscribe(client, req["topic"].get<std::string>());
            return {reply(Json{{"op", "ack"}, {"topic", req["topic"]}})};
        }
        if (op == "unsub") {
            broker.unsubscribe(client, req["topic"].get<std::string>());
            return {reply(Json{{"op", "ack"}, {"topic", req["topic"]}})};
        }
        if (op == "tick") {
            if (!req.contains("dt_us") || !req["dt_us"].is_number_integer()) {
                return {reply(error_frame("E_MALFORMED_FRAME", "'tick' requires integer 'dt_us'"))};
            }
            broker.tick(req["dt_us"].get<std::int64_t>());
            return {reply(Json{{"op", "ack"},
                               {"topic", kTickTopic},
                               {"seq", broker.last_seq(kTickTopic)},
                               {"stamp_us", broker.now_us()}})};
        }
        return {reply(error_frame("E_UNKNOWN_OP", "unknown op '" + op + "'"))};
    } catch (const Error& e) {
        return {reply(error_frame(e.code(), e.what()))};
    } catch (const Json::exception& e) {
        return {reply(error_frame("E_MALFORMED_FRAME", e.what()))};
    }
}

} // namespace cobot::bus
