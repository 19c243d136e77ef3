#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/haptics/fivebar.hpp"
#include "cobot/projection/homography.hpp"
#include "cobot/projection/panel.hpp"
#include "cobot/robot/kinematics.hpp"
#include "cobot/robot/scene.hpp"
#include "cobot/robot/task.hpp"

namespace cobot::harness {

struct Ports {
    std::string host = "127.0.0.1";
    int tcp = 7450;
    int ws = 7451;
    int http = 8080;
};

/// Everything a session depends on. Its digest is written into every log header.
struct SystemConfig {
    robot::RobotConfig robot = robot::ur10_config();
    robot::TaskConfig task;
    robot::SceneState scene;
    projection::PanelLayout layout = projection::default_layout();
    /// Camera (normalized image) to panel (mm) point pairs.
    std::vector<projection::Correspondence> calibration;
    haptics::FiveBarConfig thumb;
    haptics::FiveBarConfig index;
    double stream_rate_hz = 50.0;
    double pattern_duration_s = 2.0;
    Ports ports;
};

/// Shipped defaults; identical to config/default.json.
SystemConfig default_config();

/// Scene laid out around the home tool point so the bundled scenario reaches it by jogging.
robot::SceneState default_scene();

/// Missing sections fall back to the defaults. Throws E_CONFIG.
SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::filesystem::path& path);

/// SHA-256 of the canonical JSON dump.
std::string config_digest(const SystemConfig& cfg);

/// Camera-to-panel map estimated from the calibration pairs.
projection::Homography camera_to_panel(const SystemConfig& cfg);

} // namespace cobot::harness
