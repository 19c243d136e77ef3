#include "cobot/harness/scenario.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "cobot/bus/broker.hpp"
#include "cobot/bus/server.hpp"
#include "cobot/error.hpp"
#include "cobot/harness/nodes.hpp"

namespace cobot::harness {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kPublished = {
    topics::kGestureState,   topics::kButtonEvents, topics::kPanelState,   topics::kRobotState,   topics::kRobotFault,
    topics::kSceneState,     topics::kHapticTrigger, topics::kHapticServo, topics::kHapticContact};

constexpr std::array<std::string_view, 7> kOps = {"==", "!=", "<", "<=", ">", ">=", "approx"};

[[noreturn]] void bad(std::size_t index, const std::string& what) {
    throw Error("E_SCENARIO", "step " + std::to_string(index) + ": " + what);
}

bool compare(const json& actual, const Predicate& p) {
    if (p.op == "==") {
        return actual == p.value;
    }
    if (p.op == "!=") {
        return actual != p.value;
    }
    if (!actual.is_number() || !p.value.is_number()) {
        return false;
    }
    const double a = actual.get<double>();
    const double b = p.value.get<double>();
    if (p.op == "<") {
        return a < b;
    }
    if (p.op == "<=") {
        return a <= b;
    }
    if (p.op == ">") {
        return a > b;
    }
    if (p.op == ">=") {
        return a >= b;
    }
    return std::abs(a - b) <= p.tolerance;
}

/// Local bus client collecting what the report needs.
class Observer {
public:
    explicit Observer(bus::Broker& broker) : broker_(broker) {
        id_ = broker_.connect_local([this](const bus::BusMessage& msg) { on_message(msg); });
        for (auto t : kPublished) {
            broker_.subscribe(id_, t);
        }
    }
    ~Observer() { broker_.disconnect(id_); }

    const json* latest(const std::string& topic) const {
        auto it = latest_.find(topic);
        return it == latest_.end() ? nullptr : &it->second;
    }

    std::int64_t presses = 0;
    std::int64_t pours = 0;
    std::int64_t faults = 0;
    double max_conservation_error = 0.0;
    std::optional<std::int64_t> completed_us;

private:
    void on_message(const bus::BusMessage& msg) {
        latest_[msg.topic] = msg.data;
        if (msg.topic == topics::kButtonEvents && msg.data.value("kind", "") == "press") {
            ++presses;
        } else if (msg.topic == topics::kRobotFault) {
            ++faults;
        } else if (msg.topic == topics::kSceneState) {
            on_scene(msg);
        }
    }

    void on_scene(const bus::BusMessage& msg) {
        double total = msg.data["box"]["content"].get<double>();
        const auto& cs = msg.data["containers"];
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const double fill = cs[i]["fill"].get<double>();
            total += fill;
            const int id = cs[i]["id"].get<int>();
            auto [it, fresh] = fill_.emplace(id, std::pair{fill, false});
            if (!fresh) {
                const bool pouring = fill < it->second.first;
                if (pouring && !it->second.second) {
                    ++pours;
                }
                it->second = {fill, pouring};
            }
        }
        max_conservation_error = std::max(max_conservation_error, std::abs(total - robot::kTotalContent));
        if (!completed_us && msg.data.value("completed", false)) {
            completed_us = msg.stamp_us;
        }
    }

    bus::Broker& broker_;
    bus::ClientId id_;
    std::map<std::string, json> latest_;
    std::map<int, std::pair<double, bool>> fill_; ///< id -> {last fill, was pouring}
};

} // namespace

std::string Predicate::text() const {
    std::string s = topic + path + " " + op + " " + value.dump();
    if (op == "approx") {
        s += " (tol " + json(tolerance).dump() + ")";
    }
    return s;
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
        throw Error("E_SCENARIO", "scenario must be an object with a 'steps' array");
    }
    try {
        s.name = j.value("name", std::string("unnamed"));
        s.seed = j.value("seed", std::uint64_t{0});
        s.timeout_s = j.value("timeout_s", s.timeout_s);
    } catch (const json::exception& e) {
        throw Error("E_SCENARIO", e.what());
    }
    if (!(s.timeout_s > 0.0) || !std::isfinite(s.timeout_s)) {
        throw Error("E_SCENARIO", "timeout_s must be positive");
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < j["steps"].size(); ++i) {
        const auto& js = j["steps"][i];
        Step st;
        try {
            st.at_s = js.value("at_s", prev);
            if (!std::isfinite(st.at_s) || st.at_s < 0.0) {
                bad(i, "at_s must be a non-negative number");
            }
            if (st.at_s < prev) {
                bad(i, "at_s decreases");
            }
            prev = st.at_s;
            const auto action = js.at("action").get<std::string>();
            if (action == "move_tip") {
                st.kind = Step::Kind::MoveTip;
                st.tip = {js.at("x").get<double>(), js.at("y").get<double>()};
            } else if (action == "set_gesture") {
                st.kind = Step::Kind::SetGesture;
                const auto g = js.at("gesture").get<std::string>();
                if (g != "none") {
                    st.hand = gesture::gesture_from_string(g);
                    if (*st.hand == gesture::GestureClass::Unknown) {
                        bad(i, "Unknown cannot be synthesized");
                    }
                }
            } else if (action == "wait") {
                st.kind = Step::Kind::Wait;
                st.dt = js.at("dt").get<double>();
                if (!(st.dt >= 0.0) || !std::isfinite(st.dt)) {
                    bad(i, "wait dt must be non-negative");
                }
            } else if (action == "assert") {
                st.kind = Step::Kind::Assert;
                auto& p = st.predicate;
                p.topic = js.at("topic").get<std::string>();
                p.path = js.value("path", std::string());
                p.op = js.at("op").get<std::string>();
                p.value = js.at("value");
                p.tolerance = js.value("tolerance", p.tolerance);
                if (std::find(kPublished.begin(), kPublished.end(), p.topic) == kPublished.end()) {
                    bad(i, "predicate topic '" + p.topic + "' is not published by any node");
                }
                if (std::find(kOps.begin(), kOps.end(), p.op) == kOps.end()) {
                    bad(i, "unknown predicate op '" + p.op + "'");
                }
                json::json_pointer ptr(p.path);
                (void)ptr;
            } else {
                bad(i, "unknown action '" + action + "'");
            }
        } catch (const json::exception& e) {
            bad(i, e.what());
        } catch (const Error& e) {
            if (e.code() == "E_SCENARIO") {
                throw;
            }
            bad(i, e.what());
        }
        s.steps.push_back(std::move(st));
    }
    return s;
}

json to_json(const Scenario& s) {
    auto steps = json::array();
    for (const auto& st : s.steps) {
        json js = {{"at_s", st.at_s}};
        switch (st.kind) {
        case Step::Kind::MoveTip:
            js.update({{"action", "move_tip"}, {"x", st.tip.x}, {"y", st.tip.y}});
            break;
        case Step::Kind::SetGesture:
            js.update({{"action", "set_gesture"}, {"gesture", st.hand ? gesture::to_string(*st.hand) : "none"}});
            break;
        case Step::Kind::Wait:
            js.update({{"action", "wait"}, {"dt", st.dt}});
            break;
        case Step::Kind::Assert: {
            const auto& p = st.predicate;
            js.update({{"action", "assert"}, {"topic", p.topic}, {"path", p.path}, {"op", p.op}, {"value", p.value}});
            if (p.op == "approx") {
                js["tolerance"] = p.tolerance;
            }
            break;
        }
        }
        steps.push_back(std::move(js));
    }
    return {{"name", s.name}, {"seed", s.seed}, {"timeout_s", s.timeout_s}, {"steps", steps}};
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("E_IO", "cannot open scenario " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("E_SCENARIO", path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

json to_json(const SessionReport& r) {
    return {{"scenario", r.scenario},
            {"seed", r.seed},
            {"mode", r.mode},
            {"task_completed", r.task_completed},
            {"elapsed_s", r.elapsed_s},
            {"press_event_count", r.press_event_count},
            {"pour_events", r.pour_events},
            {"determinism_digest", r.determinism_digest},
            {"config_digest", r.config_digest},
            {"timed_out", r.timed_out},
            {"ticks", r.ticks},
            {"messages", r.messages},
            {"box_content", r.box_content},
            {"container_fill", r.container_fill},
            {"max_conservation_error", r.max_conservation_error},
            {"faults", r.faults},
            {"failed_assertion",
             r.failed_assertion ? json{{"predicate", *r.failed_assertion}, {"at_s", r.failed_at_s}} : json()}};
}

SessionResult run_scenario(const Scenario& scenario, const SystemConfig& cfg, const RunOptions& options) {
    const bool live = options.mode == RunMode::Live;
    const auto digest = config_digest(cfg);
    bus::Broker broker({live ? bus::ClockMode::Wall : bus::ClockMode::Virtual, digest, true});

    std::unique_ptr<bus::BusServer> server;
    if (live) {
        server = std::make_unique<bus::BusServer>(
            broker, bus::BindConfig{cfg.ports.host, static_cast<std::uint16_t>(cfg.ports.tcp),
                                    static_cast<std::uint16_t>(cfg.ports.ws)});
        server->start();
    }

    Observer observer(broker);
    NodeSet nodes(broker, cfg);
    broker.pump();

    const auto panel_to_camera = camera_to_panel(cfg).inverse();
    const std::uint64_t seed = options.seed.value_or(scenario.seed);
    const auto timeout_us = static_cast<std::int64_t>(std::llround(scenario.timeout_s * 1e6));

    SessionReport report;
    report.scenario = scenario.name;
    report.seed = seed;
    report.mode = live ? "live" : "headless";
    report.config_digest = digest;

    std::optional<gesture::GestureClass> hand;
    Point2 tip{cfg.layout.width_mm / 2, cfg.layout.height_mm / 2};
    std::int64_t elapsed_us = 0;
    const auto wall_origin = std::chrono::steady_clock::now();

    // One tick: the current hand frame, then the clock. Returns false on timeout.
    auto tick = [&]() {
        if (elapsed_us + kTickUs > timeout_us) {
            report.timed_out = true;
            return false;
        }
        if (hand) {
            const auto cam = projection::project_point(panel_to_camera, tip);
            const auto frame = gesture::synth_frame(*hand, cam, seed + static_cast<std::uint64_t>(report.ticks));
            broker.publish(0, topics::kHandFrames, gesture::to_json(frame));
            broker.pump();
        }
        elapsed_us += kTickUs;
        ++report.ticks;
        if (live) {
            std::this_thread::sleep_until(wall_origin + std::chrono::microseconds(elapsed_us));
            broker.publish(0, bus::kTickTopic, {{"dt_us", kTickUs}, {"now_us", broker.now_us()}});
        } else {
            broker.tick(kTickUs);
        }
        broker.pump();
        return true;
    };

    for (const auto& st : scenario.steps) {
        const auto at_us = static_cast<std::int64_t>(std::llround(st.at_s * 1e6));
        bool running = true;
        while (running && elapsed_us < at_us) {
            running = tick();
        }
        if (!running) {
            break;
        }
        if (st.kind == Step::Kind::MoveTip) {
            tip = st.tip;
        } else if (st.kind == Step::Kind::SetGesture) {
            hand = st.hand;
        } else if (st.kind == Step::Kind::Wait) {
            const auto end = elapsed_us + static_cast<std::int64_t>(std::llround(st.dt * 1e6));
            while (running && elapsed_us < end) {
                running = tick();
            }
            if (!running) {
                break;
            }
        } else {
            const auto& p = st.predicate;
            bool ok = false;
            if (const json* data = observer.latest(p.topic)) {
                const json::json_pointer ptr(p.path);
                ok = data->contains(ptr) && compare(data->at(ptr), p);
            }
            if (!ok) {
                report.failed_assertion = p.text();
                report.failed_at_s = static_cast<double>(elapsed_us) * 1e-6;
                break;
            }
        }
    }
    broker.pump();
    if (server) {
        server->stop();
    }

    report.press_event_count = observer.presses;
    report.pour_events = observer.pours;
    report.faults = observer.faults;
    report.max_conservation_error = observer.max_conservation_error;
    if (const json* scene = observer.latest(std::string(topics::kSceneState))) {
        report.box_content = (*scene)["box"]["content"].get<double>();
        for (const auto& c : (*scene)["containers"]) {
            report.container_fill.push_back(c["fill"].get<double>());
        }
    }
    report.task_completed = observer.completed_us.has_value();
    report.elapsed_s = static_cast<double>(report.task_completed ? *observer.completed_us - broker.log().header.start_stamp_us
                                                                 : elapsed_us) *
                       1e-6;

    SessionResult result{std::move(report), broker.log()};
    result.report.messages = result.log.messages.size();
    result.report.determinism_digest = bus::log_digest(result.log.messages);
    return result;
}

} // namespace cobot::harness
