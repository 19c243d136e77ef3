#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cobot/robot/kinematics.hpp"

namespace cobot::robot {

struct Gripper {
    double opening_mm = 85.0;
    std::optional<int> holding; ///< container id
};

struct RobotState {
    Joints joints = Joints::Zero();
    Pose pose; ///< forward_kinematics(joints)
    Gripper gripper;
    bool wrist_rotation_active = false;
};

RobotState make_state(const RobotConfig& cfg, const Joints& q);

/// Default start pose: elbow up, tool axis horizontal pointing along -X.
Joints home_joints();

struct TaskConfig {
    double jog_speed = 0.05;        ///< m/s
    double wrist_rate = 0.5;        ///< rad/s, sign selects CW/CCW
    double gripper_speed = 50.0;    ///< mm/s
    double gripper_stroke = 85.0;   ///< mm
    double grasp_tolerance = 0.010; ///< m
    /// Jog IK runs tighter than the general IK defaults so the Cartesian step is exact.
    IkOptions jog_ik{0.01, 0.1, 1e-10, 1e-9, 200};
};

TaskConfig task_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskConfig& cfg);

enum class Axis { XPlus, XMinus, YPlus, YMinus, ZPlus, ZMinus };

Eigen::Vector3d axis_unit(Axis a);
std::string to_string(Axis a);

struct JogCommand {
    Axis axis = Axis::XPlus;
    double speed = 0.05; ///< m/s
};

struct Fault {
    std::string code;
    std::string message;
};

nlohmann::json to_json(const Fault& f);

struct JogResult {
    RobotState state;
    std::optional<Fault> fault;
};

/// Moves the tool point by axis * speed * dt with the orientation held. Any
/// failure leaves the state untouched and is reported as a fault.
JogResult jog_step(const RobotConfig& cfg, const TaskConfig& task, const RobotState& state, const JogCommand& cmd,
                   double dt);

enum class GripperAction { Open, Close };

struct SceneState;

/// Slews the fingers; Close grabs a container whose grasp point is within
/// grasp_tolerance of the tool point, Open lets go.
RobotState gripper_step(const TaskConfig& task, const RobotState& state, const SceneState& scene, GripperAction action,
                        double dt);

enum class RotationDirection { CW, CCW };

struct HapticTrigger {
    RotationDirection direction = RotationDirection::CW;
    bool active = false;

    bool operator==(const HapticTrigger&) const = default;
};

std::string to_string(RotationDirection d);
nlohmann::json to_json(const HapticTrigger& t);
HapticTrigger haptic_trigger_from_json(const nlohmann::json& j);

struct RotateResult {
    RobotState state;
    HapticTrigger trigger;
};

RotateResult rotate_step(const RobotConfig& cfg, const TaskConfig& task, const RobotState& state, double dt);

/// State and trigger after the rotate button is let go.
RotateResult rotate_release(const TaskConfig& task, const RobotState& state);

nlohmann::json to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RobotState& s);

} // namespace cobot::robot
