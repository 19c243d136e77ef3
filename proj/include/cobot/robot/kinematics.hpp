#pragma once

#include <array>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "cobot/error.hpp"

namespace cobot::robot {

using Joints = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Standard (distal) Denavit-Hartenberg row: Rz(theta) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
    double a = 0.0;            ///< m
    double alpha = 0.0;        ///< rad
    double d = 0.0;            ///< m
    double theta_offset = 0.0; ///< rad
};

struct JointLimit {
    double min = 0.0;
    double max = 0.0;
};

struct RobotConfig {
    std::array<DhRow, 6> dh{};
    std::array<JointLimit, 6> limits{};
    double max_joint_speed = 2.0; ///< rad/s
    double max_cart_speed = 0.25; ///< m/s
    /// Tool centre point offset along the flange z axis, m.
    double tool_length = 0.0;
};

/// UR10 kinematic sheet values with a 150 mm two-finger gripper TCP.
RobotConfig ur10_config();

void validate(const RobotConfig& cfg);
RobotConfig robot_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RobotConfig& cfg);

struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

    Eigen::Isometry3d isometry() const;
    static Pose from_isometry(const Eigen::Isometry3d& t);
};

class LimitViolation : public Error {
public:
    LimitViolation(int joint, double value, const JointLimit& limit);
    int joint() const noexcept { return joint_; }

private:
    int joint_;
};

class NoConvergence : public Error {
public:
    NoConvergence(double position_residual, double rotation_residual);
    double position_residual() const noexcept { return pos_; }
    double rotation_residual() const noexcept { return rot_; }

private:
    double pos_;
    double rot_;
};

class Unreachable : public Error {
public:
    Unreachable(double distance, double reach);
};

/// Throws LimitViolation naming the first joint (1-based) outside its range.
void check_limits(const RobotConfig& cfg, const Joints& q);

/// Frame transforms 0..6 (base, then after each joint), tool applied to the last.
std::array<Eigen::Isometry3d, 7> frame_chain(const RobotConfig& cfg, const Joints& q);

Pose forward_kinematics(const RobotConfig& cfg, const Joints& q);

/// Geometric Jacobian at the tool point: column i = (z_{i-1} x (p_e - p_{i-1}), z_{i-1}).
Matrix6 jacobian(const RobotConfig& cfg, const Joints& q);

/// Upper bound on the tool distance from the shoulder (triangle inequality over the chain).
double max_reach(const RobotConfig& cfg);

struct IkOptions {
    double damping = 0.01;
    double max_step = 0.1;           ///< rad, per iteration, max-norm
    double position_tolerance = 1e-6; ///< m
    double rotation_tolerance = 1e-4; ///< rad
    int max_iterations = 200;
};

struct IkResult {
    Joints joints = Joints::Zero();
    int iterations = 0;
    double position_residual = 0.0;
    double rotation_residual = 0.0;
};

/// Damped least squares: dq = J^T (J J^T + lambda^2 I)^-1 e, clamped per step and
/// to the joint limits. Throws Unreachable when the target lies beyond
/// max_reach(), NoConvergence (with the best residual) after max_iterations.
IkResult inverse_kinematics(const RobotConfig& cfg, const Pose& target, const Joints& seed,
                            const IkOptions& options = {});

/// 6-vector (position error, rotation error as axis*angle) from `current` to `target`.
Vector6 pose_error(const Pose& target, const Pose& current);

} // namespace cobot::robot
