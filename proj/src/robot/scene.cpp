#include "cobot/robot/scene.hpp"

#include <algorithm>
#include <cmath>

#include "cobot/robot/task.hpp"

namespace cobot::robot {

Eigen::Vector3d Container::grasp_point() const {
    return pose.position + pose.orientation * grasp_offset;
}

double Container::tilt() const {
    const Eigen::Vector3d up = pose.orientation * Eigen::Vector3d::UnitZ();
    return std::acos(std::clamp(up.z(), -1.0, 1.0));
}

bool Box::over(const Eigen::Vector3d& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
}

double SceneState::total_content() const {
    return containers[0].fill + containers[1].fill + box.content;
}

Container& SceneState::container(int id) {
    for (auto& c : containers) {
        if (c.id == id) {
            return c;
        }
    }
    throw Error("E_SCENE", "no container with id " + std::to_string(id));
}

const Container& SceneState::container(int id) const {
    return const_cast<SceneState*>(this)->container(id);
}

SceneState scene_step(const SceneState& scene, const RobotState& robot, double dt) {
    SceneState next = scene;
    const auto tool = robot.pose.isometry();

    if (!robot.gripper.holding) {
        next.attachment.reset();
    } else if (!next.attachment || next.attachment->container != *robot.gripper.holding) {
        const auto& c = next.container(*robot.gripper.holding);
        next.attachment = Attachment{c.id, tool.inverse() * c.pose.isometry()};
    }
    if (next.attachment) {
        auto& c = next.container(next.attachment->container);
        c.pose = Pose::from_isometry(tool * next.attachment->tool_to_container);
    }

    constexpr double kPourTilt = 1.5707963267948966;
    for (auto& c : next.containers) {
        if (c.tilt() > kPourTilt && next.box.over(c.pose.position) && dt > 0.0) {
            const double amount = std::min(c.fill, next.pour_rate * dt);
            c.fill -= amount;
            next.box.content += amount;
        }
    }
    return next;
}

bool task_completed(const SceneState& scene, double tolerance) {
    return scene.containers[0].fill <= tolerance && scene.containers[1].fill <= tolerance;
}

SceneState scene_from_json(const nlohmann::json& j) {
    SceneState s;
    try {
        const auto& cs = j.at("containers");
        if (cs.size() != 2) {
            throw Error("E_SCENE", "scene needs exactly two containers");
        }
        for (int i = 0; i < 2; ++i) {
            auto& c = s.containers[i];
            c.id = cs[i].at("id").get<int>();
            c.pose = pose_from_json(cs[i]);
            c.fill = cs[i].value("fill", 1.0);
            if (cs[i].contains("grasp_offset")) {
                const auto& g = cs[i]["grasp_offset"];
                c.grasp_offset = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>()};
            }
            if (!(c.fill >= 0.0 && c.fill <= 1.0)) {
                throw Error("E_SCENE", "container fill must lie in [0, 1]");
            }
        }
        if (s.containers[0].id == s.containers[1].id) {
            throw Error("E_SCENE", "container ids must differ");
        }
        const auto& b = j.at("box");
        const auto& fp = b.at("footprint");
        s.box = {fp.at(0).get<double>(), fp.at(1).get<double>(), fp.at(2).get<double>(), fp.at(3).get<double>(),
                 b.value("content", 0.0)};
        if (!(s.box.min_x < s.box.max_x && s.box.min_y < s.box.max_y)) {
            throw Error("E_SCENE", "box footprint must be [min_x, min_y, max_x, max_y]");
        }
        s.pour_rate = j.value("pour_rate", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_SCENE", e.what());
    }
    if (std::abs(s.total_content() - kTotalContent) > 1e-9) {
        throw Error("E_SCENE", "container fills plus box content must total 2.0");
    }
    return s;
}

nlohmann::json to_json(const SceneState& s) {
    auto cs = nlohmann::json::array();
    for (const auto& c : s.containers) {
        auto jc = to_json(c.pose);
        jc["id"] = c.id;
        jc["fill"] = c.fill;
        jc["grasp_offset"] = {c.grasp_offset.x(), c.grasp_offset.y(), c.grasp_offset.z()};
        jc["tilt"] = c.tilt();
        cs.push_back(std::move(jc));
    }
    nlohmann::json out = {{"containers", cs},
                          {"box", {{"footprint", {s.box.min_x, s.box.min_y, s.box.max_x, s.box.max_y}},
                                   {"content", s.box.content}}},
                          {"pour_rate", s.pour_rate},
                          {"attachment", nullptr},
                          {"completed", task_completed(s)}};
    if (s.attachment) {
        out["attachment"] = s.attachment->container;
    }
    return out;
}

} // namespace cobot::robot
