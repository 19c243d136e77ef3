#include "cobot/harness/config.hpp"

#include <fstream>

#include "cobot/bus/session_log.hpp"
#include "cobot/error.hpp"

namespace cobot::harness {

namespace {

using nlohmann::json;

json vec3(const Eigen::Vector3d& v) {
    return {v.x(), v.y(), v.z()};
}

json scene_json(const robot::SceneState& s) {
    auto cs = json::array();
    for (const auto& c : s.containers) {
        auto jc = robot::to_json(c.pose);
        jc["id"] = c.id;
        jc["fill"] = c.fill;
        jc["grasp_offset"] = vec3(c.grasp_offset);
        cs.push_back(std::move(jc));
    }
    return {{"containers", cs},
            {"box", {{"footprint", {s.box.min_x, s.box.min_y, s.box.max_x, s.box.max_y}}, {"content", s.box.content}}},
            {"pour_rate", s.pour_rate}};
}

std::vector<projection::Correspondence> default_calibration() {
    // Panel corners as seen by a camera looking slightly down onto the table.
    return {{{0.20, 0.25}, {0.0, 0.0}},
            {{0.80, 0.22}, {300.0, 0.0}},
            {{0.84, 0.78}, {300.0, 200.0}},
            {{0.16, 0.75}, {0.0, 200.0}}};
}

Point2 point_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

} // namespace

robot::SceneState default_scene() {
    const auto cfg = robot::ur10_config();
    const Eigen::Vector3d p0 = robot::forward_kinematics(cfg, robot::home_joints()).position;
    const Eigen::Vector3d grasp_offset(0.0, 0.0, 0.05);

    robot::SceneState s;
    s.containers[0].id = 1;
    s.containers[0].pose.position = p0 + Eigen::Vector3d(0.0, 0.0, -0.15) - grasp_offset;
    s.containers[1].id = 2;
    s.containers[1].pose.position = p0 + Eigen::Vector3d(0.15, 0.0, -0.15) - grasp_offset;
    for (auto& c : s.containers) {
        c.fill = 1.0;
        c.grasp_offset = grasp_offset;
    }
    const double cx = p0.x();
    const double cy = p0.y() + 0.30;
    s.box = {cx - 0.10, cy - 0.10, cx + 0.10, cy + 0.10, 0.0};
    s.pour_rate = 1.0;
    return s;
}

SystemConfig default_config() {
    SystemConfig c;
    c.scene = default_scene();
    c.calibration = default_calibration();
    return c;
}

SystemConfig config_from_json(const json& j) {
    SystemConfig c = default_config();
    try {
        if (!j.is_object()) {
            throw Error("E_CONFIG", "config must be a JSON object");
        }
        if (j.contains("robot")) {
            c.robot = robot::robot_config_from_json(j["robot"]);
        }
        if (j.contains("task")) {
            c.task = robot::task_config_from_json(j["task"]);
        }
        if (j.contains("scene")) {
            c.scene = robot::scene_from_json(j["scene"]);
        }
        if (j.contains("layout")) {
            c.layout = projection::layout_from_json(j["layout"]);
        }
        if (j.contains("calibration")) {
            c.calibration.clear();
            for (const auto& p : j["calibration"]) {
                c.calibration.push_back({point_from_json(p.at("camera")), point_from_json(p.at("panel"))});
            }
        }
        if (j.contains("haptics")) {
            const auto& h = j["haptics"];
            if (h.contains("thumb")) {
                c.thumb = haptics::fivebar_config_from_json(h["thumb"]);
            }
            if (h.contains("index")) {
                c.index = haptics::fivebar_config_from_json(h["index"]);
            }
            c.stream_rate_hz = h.value("stream_rate_hz", c.stream_rate_hz);
            c.pattern_duration_s = h.value("pattern_duration_s", c.pattern_duration_s);
        }
        if (j.contains("ports")) {
            const auto& p = j["ports"];
            c.ports.host = p.value("host", c.ports.host);
            c.ports.tcp = p.value("tcp", c.ports.tcp);
            c.ports.ws = p.value("ws", c.ports.ws);
            c.ports.http = p.value("http", c.ports.http);
        }
    } catch (const json::exception& e) {
        throw Error("E_CONFIG", e.what());
    } catch (const Error& e) {
        throw Error("E_CONFIG", e.code() + ": " + e.what());
    }
    if (!(c.stream_rate_hz > 0.0) || !(c.pattern_duration_s > 0.0)) {
        throw Error("E_CONFIG", "stream rate and pattern duration must be positive");
    }
    if (c.calibration.size() < 4) {
        throw Error("E_CONFIG", "calibration needs at least four point pairs");
    }
    for (int port : {c.ports.tcp, c.ports.ws, c.ports.http}) {
        if (port < 0 || port > 65535) {
            throw Error("E_CONFIG", "port out of range: " + std::to_string(port));
        }
    }
    return c;
}

json to_json(const SystemConfig& c) {
    auto calibration = json::array();
    for (const auto& p : c.calibration) {
        calibration.push_back({{"camera", {p.from.x, p.from.y}}, {"panel", {p.to.x, p.to.y}}});
    }
    return {{"robot", robot::to_json(c.robot)},
            {"task", robot::to_json(c.task)},
            {"scene", scene_json(c.scene)},
            {"layout", projection::to_json(c.layout)},
            {"calibration", calibration},
            {"haptics",
             {{"thumb", haptics::to_json(c.thumb)},
              {"index", haptics::to_json(c.index)},
              {"stream_rate_hz", c.stream_rate_hz},
              {"pattern_duration_s", c.pattern_duration_s}}},
            {"ports", {{"host", c.ports.host}, {"tcp", c.ports.tcp}, {"ws", c.ports.ws}, {"http", c.ports.http}}}};
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("E_IO", "cannot open config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("E_CONFIG", path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_digest(const SystemConfig& cfg) {
    return bus::sha256_hex(to_json(cfg).dump());
}

projection::Homography camera_to_panel(const SystemConfig& cfg) {
    return projection::estimate_homography(cfg.calibration);
}

} // namespace cobot::harness
