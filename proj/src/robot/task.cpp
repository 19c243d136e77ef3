#include "cobot/robot/task.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cobot/robot/scene.hpp"

namespace cobot::robot {

RobotState make_state(const RobotConfig& cfg, const Joints& q) {
    RobotState s;
    s.joints = q;
    s.pose = forward_kinematics(cfg, q);
    return s;
}

Joints home_joints() {
    Joints q;
    q << 0.0, -2.0, 2.0, 0.0, std::numbers::pi / 2, 0.0;
    return q;
}

TaskConfig task_config_from_json(const nlohmann::json& j) {
    TaskConfig t;
    t.jog_speed = j.value("jog_speed", t.jog_speed);
    t.wrist_rate = j.value("wrist_rate", t.wrist_rate);
    t.gripper_speed = j.value("gripper_speed", t.gripper_speed);
    t.gripper_stroke = j.value("gripper_stroke", t.gripper_stroke);
    t.grasp_tolerance = j.value("grasp_tolerance", t.grasp_tolerance);
    if (!(t.jog_speed > 0 && t.gripper_speed > 0 && t.gripper_stroke > 0 && t.grasp_tolerance > 0) ||
        t.wrist_rate == 0.0) {
        throw Error("E_CONFIG", "task speeds must be positive (wrist rate non-zero)");
    }
    return t;
}

nlohmann::json to_json(const TaskConfig& cfg) {
    return {{"jog_speed", cfg.jog_speed},
            {"wrist_rate", cfg.wrist_rate},
            {"gripper_speed", cfg.gripper_speed},
            {"gripper_stroke", cfg.gripper_stroke},
            {"grasp_tolerance", cfg.grasp_tolerance}};
}

Eigen::Vector3d axis_unit(Axis a) {
    switch (a) {
    case Axis::XPlus: return Eigen::Vector3d::UnitX();
    case Axis::XMinus: return -Eigen::Vector3d::UnitX();
    case Axis::YPlus: return Eigen::Vector3d::UnitY();
    case Axis::YMinus: return -Eigen::Vector3d::UnitY();
    case Axis::ZPlus: return Eigen::Vector3d::UnitZ();
    case Axis::ZMinus: return -Eigen::Vector3d::UnitZ();
    }
    return Eigen::Vector3d::Zero();
}

std::string to_string(Axis a) {
    switch (a) {
    case Axis::XPlus: return "X+";
    case Axis::XMinus: return "X-";
    case Axis::YPlus: return "Y+";
    case Axis::YMinus: return "Y-";
    case Axis::ZPlus: return "Z+";
    case Axis::ZMinus: return "Z-";
    }
    return "?";
}

nlohmann::json to_json(const Fault& f) {
    return {{"code", f.code}, {"message", f.message}};
}

JogResult jog_step(const RobotConfig& cfg, const TaskConfig& task, const RobotState& state, const JogCommand& cmd,
                   double dt) {
    if (!(cmd.speed > 0.0 && cmd.speed <= cfg.max_cart_speed)) {
        return {state, Fault{"E_INVALID_COMMAND", "jog speed must lie in (0, max_cart_speed]"}};
    }
    if (!(dt > 0.0)) {
        return {state, std::nullopt};
    }
    Pose target = state.pose;
    target.position += axis_unit(cmd.axis) * (cmd.speed * dt);
    try {
        const auto ik = inverse_kinematics(cfg, target, state.joints, task.jog_ik);
        RobotState next = state;
        next.joints = ik.joints;
        next.pose = forward_kinematics(cfg, ik.joints);
        return {next, std::nullopt};
    } catch (const Error& e) {
        return {state, Fault{e.code(), e.what()}};
    }
}

RobotState gripper_step(const TaskConfig& task, const RobotState& state, const SceneState& scene, GripperAction action,
                        double dt) {
    RobotState next = state;
    const double step = task.gripper_speed * std::max(dt, 0.0);
    if (action == GripperAction::Open) {
        next.gripper.opening_mm = std::min(task.gripper_stroke, state.gripper.opening_mm + step);
        next.gripper.holding.reset();
        return next;
    }
    next.gripper.opening_mm = std::max(0.0, state.gripper.opening_mm - step);
    if (!next.gripper.holding) {
        for (const auto& c : scene.containers) {
            if ((c.grasp_point() - state.pose.position).norm() <= task.grasp_tolerance) {
                next.gripper.holding = c.id;
                break;
            }
        }
    }
    return next;
}

std::string to_string(RotationDirection d) {
    return d == RotationDirection::CW ? "CW" : "CCW";
}

nlohmann::json to_json(const HapticTrigger& t) {
    return {{"direction", to_string(t.direction)}, {"active", t.active}};
}

HapticTrigger haptic_trigger_from_json(const nlohmann::json& j) {
    HapticTrigger t;
    try {
        const auto dir = j.at("direction").get<std::string>();
        if (dir != "CW" && dir != "CCW") {
            throw Error("E_BAD_TRIGGER", "direction must be CW or CCW");
        }
        t.direction = dir == "CW" ? RotationDirection::CW : RotationDirection::CCW;
        t.active = j.at("active").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_BAD_TRIGGER", e.what());
    }
    return t;
}

RotateResult rotate_step(const RobotConfig& cfg, const TaskConfig& task, const RobotState& state, double dt) {
    const auto dir = task.wrist_rate > 0 ? RotationDirection::CW : RotationDirection::CCW;
    const double q6 = state.joints[5] + task.wrist_rate * std::max(dt, 0.0);
    const auto& lim = cfg.limits[5];
    if (q6 > lim.max || q6 < lim.min) {
        RobotState held = state;
        held.wrist_rotation_active = false;
        return {held, {dir, false}};
    }
    RobotState next = state;
    next.joints[5] = q6;
    next.pose = forward_kinematics(cfg, next.joints);
    next.wrist_rotation_active = true;
    return {next, {dir, true}};
}

RotateResult rotate_release(const TaskConfig& task, const RobotState& state) {
    RobotState next = state;
    next.wrist_rotation_active = false;
    return {next, {task.wrist_rate > 0 ? RotationDirection::CW : RotationDirection::CCW, false}};
}

nlohmann::json to_json(const Pose& p) {
    const auto& q = p.orientation;
    return {{"position", {p.position.x(), p.position.y(), p.position.z()}},
            {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

Pose pose_from_json(const nlohmann::json& j) {
    Pose p;
    try {
        const auto& pos = j.at("position");
        p.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
        if (j.contains("orientation")) {
            const auto& o = j.at("orientation");
            p.orientation = Eigen::Quaterniond(o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>(),
                                               o.at(3).get<double>());
            if (std::abs(p.orientation.norm() - 1.0) > 1e-6) {
                throw Error("E_BAD_POSE", "orientation must be a unit quaternion [w, x, y, z]");
            }
            p.orientation.normalize();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_BAD_POSE", e.what());
    }
    return p;
}

nlohmann::json to_json(const RobotState& s) {
    nlohmann::json gripper = {{"opening_mm", s.gripper.opening_mm}, {"holding", nullptr}};
    if (s.gripper.holding) {
        gripper["holding"] = *s.gripper.holding;
    }
    return {{"joints", std::vector<double>(s.joints.data(), s.joints.data() + 6)},
            {"pose", to_json(s.pose)},
            {"gripper", gripper},
            {"wrist_rotation_active", s.wrist_rotation_active}};
}

} // namespace cobot::robot
