#pragma once

#include <array>
#include <optional>

#include <nlohmann/json.hpp>

#include "cobot/robot/kinematics.hpp"

namespace cobot::robot {

struct RobotState;

struct Container {
    int id = 0;
    Pose pose;
    double fill = 1.0;
    /// Grasp point in the container frame.
    Eigen::Vector3d grasp_offset = Eigen::Vector3d::Zero();

    Eigen::Vector3d grasp_point() const;
    /// Angle between the container's up axis and world up, rad.
    double tilt() const;
};

struct Box {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;
    double content = 0.0;

    bool over(const Eigen::Vector3d& p) const;
};

struct Attachment {
    int container = 0;
    Eigen::Isometry3d tool_to_container = Eigen::Isometry3d::Identity();
};

struct SceneState {
    std::array<Container, 2> containers;
    Box box;
    std::optional<Attachment> attachment;
    double pour_rate = 1.0; ///< fill fraction per second

    double total_content() const;
    Container& container(int id);
    const Container& container(int id) const;
};

inline constexpr double kTotalContent = 2.0;

/// Syncs the attachment with the gripper, carries the held container with the
/// tool and pours any container tipped past 90 degrees over the box.
SceneState scene_step(const SceneState& scene, const RobotState& robot, double dt);

/// True once both containers are empty.
bool task_completed(const SceneState& scene, double tolerance = 1e-9);

SceneState scene_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SceneState& s);

} // namespace cobot::robot
