#include "cobot/robot/kinematics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace cobot::robot {

namespace {

Eigen::Isometry3d dh_transform(const DhRow& row, double q) {
    const double theta = q + row.theta_offset;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    Eigen::Matrix4d m;
    m << ct, -st * ca, st * sa, row.a * ct,
         st, ct * ca, -ct * sa, row.a * st,
         0.0, sa, ca, row.d,
         0.0, 0.0, 0.0, 1.0;
    return Eigen::Isometry3d(m);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

RobotConfig ur10_config() {
    constexpr double pi = std::numbers::pi;
    RobotConfig cfg;
    cfg.dh = {{
        {0.0, pi / 2, 0.1273, 0.0},
        {-0.612, 0.0, 0.0, 0.0},
        {-0.5723, 0.0, 0.0, 0.0},
        {0.0, pi / 2, 0.163941, 0.0},
        {0.0, -pi / 2, 0.1157, 0.0},
        {0.0, 0.0, 0.0922, 0.0},
    }};
    for (auto& l : cfg.limits) {
        l = {-2 * pi, 2 * pi};
    }
    cfg.max_joint_speed = pi / 2;
    cfg.max_cart_speed = 0.25;
    cfg.tool_length = 0.15;
    return cfg;
}

void validate(const RobotConfig& cfg) {
    for (int i = 0; i < 6; ++i) {
        if (!(cfg.limits[i].min < cfg.limits[i].max)) {
            throw Error("E_CONFIG", "joint " + std::to_string(i + 1) + " limit min must be below max");
        }
    }
    if (!(cfg.max_joint_speed > 0.0 && cfg.max_cart_speed > 0.0)) {
        throw Error("E_CONFIG", "robot speeds must be positive");
    }
}

RobotConfig robot_config_from_json(const nlohmann::json& j) {
    RobotConfig cfg;
    try {
        const auto& dh = j.at("dh");
        const auto& lim = j.at("joint_limits");
        if (dh.size() != 6 || lim.size() != 6) {
            throw Error("E_CONFIG", "robot config needs 6 DH rows and 6 joint limits");
        }
        for (int i = 0; i < 6; ++i) {
            cfg.dh[i] = {dh[i].at("a").get<double>(), dh[i].at("alpha").get<double>(), dh[i].at("d").get<double>(),
                         dh[i].value("theta_offset", 0.0)};
            cfg.limits[i] = {lim[i].at(0).get<double>(), lim[i].at(1).get<double>()};
        }
        cfg.max_joint_speed = j.at("max_joint_speed").get<double>();
        cfg.max_cart_speed = j.at("max_cart_speed").get<double>();
        cfg.tool_length = j.value("tool_length", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_CONFIG", std::string("bad robot config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

nlohmann::json to_json(const RobotConfig& cfg) {
    auto dh = nlohmann::json::array();
    auto lim = nlohmann::json::array();
    for (int i = 0; i < 6; ++i) {
        dh.push_back({{"a", cfg.dh[i].a}, {"alpha", cfg.dh[i].alpha}, {"d", cfg.dh[i].d},
                      {"theta_offset", cfg.dh[i].theta_offset}});
        lim.push_back({cfg.limits[i].min, cfg.limits[i].max});
    }
    return {{"dh", dh},
            {"joint_limits", lim},
            {"max_joint_speed", cfg.max_joint_speed},
            {"max_cart_speed", cfg.max_cart_speed},
            {"tool_length", cfg.tool_length}};
}

Eigen::Isometry3d Pose::isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = orientation.toRotationMatrix();
    t.translation() = position;
    return t;
}

Pose Pose::from_isometry(const Eigen::Isometry3d& t) {
    Pose p;
    p.position = t.translation();
    p.orientation = Eigen::Quaterniond(t.rotation()).normalized();
    return p;
}

LimitViolation::LimitViolation(int joint, double value, const JointLimit& limit)
    : Error("E_JOINT_LIMIT", "joint " + std::to_string(joint) + " = " + fmt(value) + " rad outside [" +
                                 fmt(limit.min) + ", " + fmt(limit.max) + "]"),
      joint_(joint) {}

NoConvergence::NoConvergence(double position_residual, double rotation_residual)
    : Error("E_NO_CONVERGENCE", "inverse kinematics did not converge (best residual " + fmt(position_residual) +
                                    " m, " + fmt(rotation_residual) + " rad)"),
      pos_(position_residual),
      rot_(rotation_residual) {}

Unreachable::Unreachable(double distance, double reach)
    : Error("E_UNREACHABLE", "target " + fmt(distance) + " m from the shoulder exceeds reach " + fmt(reach) + " m") {}

void check_limits(const RobotConfig& cfg, const Joints& q) {
    for (int i = 0; i < 6; ++i) {
        if (!(q[i] >= cfg.limits[i].min && q[i] <= cfg.limits[i].max)) {
            throw LimitViolation(i + 1, q[i], cfg.limits[i]);
        }
    }
}

std::array<Eigen::Isometry3d, 7> frame_chain(const RobotConfig& cfg, const Joints& q) {
    std::array<Eigen::Isometry3d, 7> frames;
    frames[0] = Eigen::Isometry3d::Identity();
    for (int i = 0; i < 6; ++i) {
        frames[i + 1] = frames[i] * dh_transform(cfg.dh[i], q[i]);
    }
    frames[6] = frames[6] * Eigen::Translation3d(0.0, 0.0, cfg.tool_length);
    return frames;
}

Pose forward_kinematics(const RobotConfig& cfg, const Joints& q) {
    check_limits(cfg, q);
    return Pose::from_isometry(frame_chain(cfg, q)[6]);
}

Matrix6 jacobian(const RobotConfig& cfg, const Joints& q) {
    check_limits(cfg, q);
    const auto frames = frame_chain(cfg, q);
    const Eigen::Vector3d pe = frames[6].translation();
    Matrix6 j;
    for (int i = 0; i < 6; ++i) {
        const Eigen::Vector3d z = frames[i].linear().col(2);
        const Eigen::Vector3d p = frames[i].translation();
        j.block<3, 1>(0, i) = z.cross(pe - p);
        j.block<3, 1>(3, i) = z;
    }
    return j;
}

double max_reach(const RobotConfig& cfg) {
    double reach = std::abs(cfg.dh[0].a) + std::abs(cfg.tool_length);
    for (int i = 1; i < 6; ++i) {
        reach += std::hypot(cfg.dh[i].a, cfg.dh[i].d);
    }
    return reach;
}

Vector6 pose_error(const Pose& target, const Pose& current) {
    Vector6 e;
    e.head<3>() = target.position - current.position;
    const Eigen::AngleAxisd rot(target.orientation.toRotationMatrix() * current.orientation.toRotationMatrix().transpose());
    e.tail<3>() = rot.axis() * rot.angle();
    return e;
}

IkResult inverse_kinematics(const RobotConfig& cfg, const Pose& target, const Joints& seed, const IkOptions& options) {
    check_limits(cfg, seed);
    const Eigen::Vector3d shoulder(0.0, 0.0, cfg.dh[0].d);
    const double distance = (target.position - shoulder).norm();
    const double reach = max_reach(cfg);
    if (distance > reach) {
        throw Unreachable(distance, reach);
    }

    const double lambda2 = options.damping * options.damping;
    Joints q = seed;
    double best_pos = std::numeric_limits<double>::infinity();
    double best_rot = std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        const auto frames = frame_chain(cfg, q);
        const Vector6 e = pose_error(target, Pose::from_isometry(frames[6]));
        const double pos_err = e.head<3>().norm();
        const double rot_err = e.tail<3>().norm();
        if (pos_err + rot_err < best_pos + best_rot) {
            best_pos = pos_err;
            best_rot = rot_err;
        }
        if (pos_err < options.position_tolerance && rot_err < options.rotation_tolerance) {
            return {q, iter, pos_err, rot_err};
        }
        if (iter >= options.max_iterations) {
            throw NoConvergence(best_pos, best_rot);
        }

        const Matrix6 j = jacobian(cfg, q);
        const Matrix6 jjt = j * j.transpose() + lambda2 * Matrix6::Identity();
        Joints dq = j.transpose() * jjt.ldlt().solve(e);
        const double largest = dq.cwiseAbs().maxCoeff();
        if (largest > options.max_step) {
            dq *= options.max_step / largest;
        }
        q += dq;
        for (int i = 0; i < 6; ++i) {
            q[i] = std::clamp(q[i], cfg.limits[i].min, cfg.limits[i].max);
        }
    }
}

} // namespace cobot::robot
