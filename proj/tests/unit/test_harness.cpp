#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cobot/analytics/tlx.hpp"
#include "cobot/bus/broker.hpp"
#include "cobot/error.hpp"
#include "cobot/harness/config.hpp"
#include "cobot/harness/nodes.hpp"
#include "cobot/harness/scenario.hpp"
#include "cobot/harness/serve.hpp"
#include "cobot/harness/verify.hpp"

using namespace cobot;
using namespace cobot::harness;
using nlohmann::json;

namespace {

const std::string kData = COBOT_DATA_DIR;

Scenario bundled() {
    return load_scenario(kData + "/scenarios/pour_two_containers.json");
}

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Panel centre of a default-layout button.
json tip_on(int button) {
    const auto c = projection::default_layout().button(button).rect.center();
    return {{"action", "move_tip"}, {"x", c.x}, {"y", c.y}};
}

json gesture_step(const char* g, double at) {
    return {{"at_s", at}, {"action", "set_gesture"}, {"gesture", g}};
}

// Palm at t, One at t + 0.1, Palm again after `hold` seconds.
void press(json& steps, int button, double t, double hold) {
    auto m = tip_on(button);
    m["at_s"] = t;
    steps.push_back(m);
    steps.push_back(gesture_step("Palm", t));
    steps.push_back(gesture_step("One", t + 0.1));
    steps.push_back(gesture_step("Palm", t + 0.1 + hold));
}

std::vector<bus::BusMessage> on_topic(const bus::SessionLog& log, std::string_view topic) {
    std::vector<bus::BusMessage> out;
    for (const auto& m : log.messages) {
        if (m.topic == topic) {
            out.push_back(m);
        }
    }
    return out;
}

} // namespace

TEST_CASE("default config round-trips and matches the shipped file") {
    const auto cfg = default_config();
    CHECK(config_digest(config_from_json(to_json(cfg))) == config_digest(cfg));
    CHECK(config_digest(load_config(kData + "/config/default.json")) == config_digest(cfg));
}

TEST_CASE("config errors") {
    CHECK(code_of([] { config_from_json(json::array()); }) == "E_CONFIG");
    CHECK(code_of([] { config_from_json({{"calibration", json::array()}}); }) == "E_CONFIG");
    CHECK(code_of([] { config_from_json({{"ports", {{"tcp", 70000}}}}); }) == "E_CONFIG");
    CHECK(code_of([] { load_config("/nonexistent/cfg.json"); }) == "E_IO");
    auto j = to_json(default_config());
    j["scene"]["containers"][0]["fill"] = 0.5;
    CHECK(code_of([&] { config_from_json(j); }) == "E_CONFIG");
}

TEST_CASE("calibration maps panel corners onto the camera quad") {
    const auto cfg = default_config();
    const auto h = camera_to_panel(cfg);
    for (const auto& c : cfg.calibration) {
        const auto p = projection::project_point(h, c.from);
        CHECK(p.x == doctest::Approx(c.to.x).epsilon(1e-9));
        CHECK(p.y == doctest::Approx(c.to.y).epsilon(1e-9));
    }
}

TEST_CASE("scenario schema errors") {
    auto s = [](json steps) { return json{{"name", "x"}, {"steps", steps}}; };
    CHECK(code_of([&] { scenario_from_json(json::object()); }) == "E_SCENARIO");
    CHECK(code_of([&] {
        scenario_from_json(s({{{"at_s", 1.0}, {"action", "wait"}, {"dt", 1}},
                              {{"at_s", 0.5}, {"action", "wait"}, {"dt", 1}}}));
    }) == "E_SCENARIO");
    CHECK(code_of([&] { scenario_from_json(s({{{"action", "jump"}}})); }) == "E_SCENARIO");
    CHECK(code_of([&] { scenario_from_json(s({{{"action", "set_gesture"}, {"gesture", "Wave"}}})); }) ==
          "E_SCENARIO");
    CHECK(code_of([&] {
        scenario_from_json(
            s({{{"action", "assert"}, {"topic", "robot/secret"}, {"path", ""}, {"op", "=="}, {"value", 1}}}));
    }) == "E_SCENARIO");
    CHECK(code_of([&] {
        scenario_from_json(
            s({{{"action", "assert"}, {"topic", "scene/state"}, {"path", "/box"}, {"op", "~"}, {"value", 1}}}));
    }) == "E_SCENARIO");
    CHECK(code_of([&] { scenario_from_json(s({{{"action", "wait"}, {"dt", -1}}})); }) == "E_SCENARIO");
}

TEST_CASE("scenario round-trips through JSON") {
    const auto sc = bundled();
    const auto again = scenario_from_json(to_json(sc));
    CHECK(to_json(again) == to_json(sc));
    CHECK(sc.steps.size() > 40);
}

TEST_CASE("empty scenario: no presses, task not completed") {
    const auto r = run_scenario(scenario_from_json({{"name", "empty"}, {"steps", json::array()}}), default_config());
    CHECK(r.report.press_event_count == 0);
    CHECK_FALSE(r.report.task_completed);
    CHECK(r.report.pour_events == 0);
    CHECK(r.report.box_content == 0.0);
}

TEST_CASE("bundled pour scenario completes the task") {
    const auto r = run_scenario(bundled(), default_config());
    const auto& rep = r.report;
    CHECK(rep.task_completed);
    CHECK_FALSE(rep.failed_assertion);
    CHECK_FALSE(rep.timed_out);
    CHECK(std::abs(rep.box_content - 2.0) <= 1e-9);
    REQUIRE(rep.container_fill.size() == 2);
    CHECK(rep.container_fill[0] == 0.0);
    CHECK(rep.container_fill[1] == 0.0);
    CHECK(rep.pour_events == 2);
    CHECK(rep.press_event_count == 12);
    CHECK(rep.faults == 0);
    CHECK(rep.elapsed_s > 0.0);

    // Conservation recomputed from the log, one scene message per tick.
    const auto scenes = on_topic(r.log, topics::kSceneState);
    CHECK(static_cast<std::int64_t>(scenes.size()) == rep.ticks);
    for (const auto& m : scenes) {
        double total = m.data["box"]["content"].get<double>();
        for (const auto& c : m.data["containers"]) {
            total += c["fill"].get<double>();
        }
        REQUIRE(std::abs(total - 2.0) <= 1e-9);
    }
}

TEST_CASE("headless runs are deterministic per seed") {
    const auto cfg = default_config();
    const auto a = run_scenario(bundled(), cfg);
    const auto b = run_scenario(bundled(), cfg);
    CHECK(a.report.determinism_digest == b.report.determinism_digest);
    CHECK(a.report.determinism_digest == bus::log_digest(a.log.messages));
    CHECK(a.log.header.config_digest == config_digest(cfg));

    // Landmark noise changes with the seed but the task outcome does not.
    const auto c = run_scenario(bundled(), cfg, {RunMode::Headless, 12345});
    CHECK(c.report.determinism_digest != a.report.determinism_digest);
    CHECK(c.report.task_completed);
    CHECK(c.report.seed == 12345);
}

TEST_CASE("button events alternate and the jog covers speed x hold time") {
    json steps = json::array();
    press(steps, 6, 0.0, 2.0); // Z-
    steps.push_back({{"action", "wait"}, {"dt", 0.1}});
    const auto r = run_scenario(scenario_from_json({{"name", "jog"}, {"steps", steps}}), default_config());
    const auto events = on_topic(r.log, topics::kButtonEvents);
    REQUIRE(events.size() == 2);
    CHECK(events[0].data["kind"] == "press");
    CHECK(events[0].data["button"] == 6);
    CHECK(events[0].data["action"] == "JogZ-");
    CHECK(events[1].data["kind"] == "release");

    const auto states = on_topic(r.log, topics::kRobotState);
    const auto z0 = states.front().data["pose"]["position"][2].get<double>();
    const auto z1 = states.back().data["pose"]["position"][2].get<double>();
    // 100 ticks of 20 ms at 0.05 m/s.
    CHECK(z0 - z1 == doctest::Approx(0.10).epsilon(1e-9));
}

TEST_CASE("rotate press streams the CW pattern until release") {
    json steps = json::array();
    press(steps, 9, 0.0, 1.0);
    steps.push_back({{"at_s", 1.5}, {"action", "wait"}, {"dt", 0.5}});
    const auto r = run_scenario(scenario_from_json({{"name", "rotate"}, {"steps", steps}}), default_config());
    const auto triggers = on_topic(r.log, topics::kHapticTrigger);
    REQUIRE(triggers.size() == 2);
    CHECK(triggers[0].data == json{{"direction", "CW"}, {"active", true}});
    CHECK(triggers[1].data["active"] == false);

    const auto servo = on_topic(r.log, topics::kHapticServo);
    CHECK(servo.size() == 50);
    for (const auto& m : servo) {
        CHECK(m.data["pattern"] == 7);
        CHECK(m.stamp_us >= triggers[0].stamp_us);
        CHECK(m.stamp_us <= triggers[1].stamp_us);
    }
    // Opposed slides: thumb and index contact positions move in opposite directions.
    const auto contacts = on_topic(r.log, topics::kHapticContact);
    REQUIRE(contacts.size() > 10);
    const auto& first = contacts[1].data;
    const auto& later = contacts[10].data;
    const double ds_thumb = later["thumb"]["s"].get<double>() - first["thumb"]["s"].get<double>();
    const double ds_index = later["index"]["s"].get<double>() - first["index"]["s"].get<double>();
    CHECK(ds_thumb * ds_index < 0.0);

    const auto q6 = on_topic(r.log, topics::kRobotState).back().data["joints"][5].get<double>();
    CHECK(q6 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("haptics/play runs a pattern once") {
    bus::Broker broker;
    NodeSet nodes(broker, default_config());
    broker.publish(0, topics::kHapticPlay, {{"pattern", 3}});
    broker.pump();
    for (int i = 0; i < 200; ++i) {
        broker.tick(kTickUs);
        broker.pump();
    }
    const auto servo = on_topic(broker.log(), topics::kHapticServo);
    CHECK(servo.size() == 101); // 2 s pattern sampled at 50 Hz, both ends included
    for (const auto& m : servo) {
        CHECK(m.data["pattern"] == 3);
    }
}

TEST_CASE("jogging out of the workspace faults once per press") {
    json steps = json::array();
    press(steps, 3, 0.0, 30.0); // Z+ far beyond reach
    const auto r = run_scenario(scenario_from_json({{"name", "reach"}, {"steps", steps}}), default_config());
    const auto faults = on_topic(r.log, topics::kRobotFault);
    REQUIRE(faults.size() == 1);
    CHECK(faults[0].data["code"] == "E_NO_CONVERGENCE");
    CHECK(r.report.faults == 1);
}

TEST_CASE("assert failure stops the run and names predicate and time") {
    json steps = json::array();
    steps.push_back({{"at_s", 0.0}, {"action", "wait"}, {"dt", 1.0}});
    steps.push_back({{"action", "assert"},
                     {"topic", "scene/state"},
                     {"path", "/box/content"},
                     {"op", ">="},
                     {"value", 1.0}});
    steps.push_back({{"action", "wait"}, {"dt", 5.0}});
    const auto r = run_scenario(scenario_from_json({{"name", "fails"}, {"steps", steps}}), default_config());
    REQUIRE(r.report.failed_assertion);
    CHECK(*r.report.failed_assertion == "scene/state/box/content >= 1.0");
    CHECK(r.report.failed_at_s == doctest::Approx(1.0));
    CHECK(r.report.ticks == 50);

    // A predicate on a topic that has not been published yet also fails.
    json early = json::array({{{"action", "assert"}, {"topic", "robot/fault"}, {"path", ""}, {"op", "!="}, {"value", nullptr}}});
    const auto e = run_scenario(scenario_from_json({{"name", "early"}, {"steps", early}}), default_config());
    CHECK(e.report.failed_assertion);
}

TEST_CASE("timeout yields task_completed=false") {
    auto sc = bundled();
    sc.timeout_s = 10.0;
    const auto r = run_scenario(sc, default_config());
    CHECK(r.report.timed_out);
    CHECK_FALSE(r.report.task_completed);
    CHECK(r.report.ticks == 500);
}

TEST_CASE("verify_log: fresh log is consistent, digest equals replay digest") {
    const auto r = run_scenario(bundled(), default_config());
    const auto v = verify_log(r.log);
    CHECK(v.consistent());
    CHECK(v.digest == r.report.determinism_digest);
    CHECK(v.messages == r.log.messages.size());
    CHECK(v.topics.at("scene/state") == static_cast<std::uint64_t>(r.report.ticks));
}

TEST_CASE("verify_log: a deleted line is a corruption naming topic and index") {
    auto log = run_scenario(bundled(), default_config()).log;
    std::stringstream text;
    bus::write_log(text, log);
    std::string line, edited;
    std::getline(text, line);
    edited += line + "\n";
    int index = 0;
    std::string dropped_topic;
    while (std::getline(text, line)) {
        if (index++ == 700) {
            dropped_topic = bus::message_from_json(json::parse(line)).topic;
            continue;
        }
        edited += line + "\n";
    }
    std::istringstream in(edited);
    const auto broken = bus::read_log(in);
    try {
        verify_log(broken);
        FAIL("expected corruption");
    } catch (const Error& e) {
        CHECK(e.code() == "E_LOG_CORRUPT");
        const std::string what = e.what();
        CHECK(what.find("'" + dropped_topic + "'") != std::string::npos);
        CHECK(what.find("message index") != std::string::npos);
    }
}

TEST_CASE("study/tlx responses are appended to the CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "cobot_tlx_test";
    std::filesystem::create_directories(dir);
    const auto csv = dir / "tlx.csv";
    std::filesystem::remove(csv);

    bus::Broker broker;
    TlxRecorder rec(broker, csv);
    analytics::TlxResponse r{"p1", {1.33, 2.08, 1.58, 1.67, 1.75, 0.92}, std::nullopt};
    broker.publish(0, topics::kStudyTlx, analytics::to_json(r));
    r.subject = "p2";
    broker.publish(0, topics::kStudyTlx, analytics::to_json(r));
    broker.publish(0, topics::kStudyTlx, {{"subject", "bad"}, {"ratings", {{"mental", 40}}}});
    broker.pump();
    CHECK(rec.recorded() == 2);
    CHECK(on_topic(broker.log(), "study/tlx_error").size() == 1);

    const auto back = analytics::read_tlx_csv(csv.string());
    REQUIRE(back.size() == 2);
    CHECK(back[1].subject == "p2");
    CHECK(back[0].ratings == r.ratings);
    CHECK(analytics::aggregate_tlx(back).raw == doctest::Approx(1.555).epsilon(1e-12));
}
