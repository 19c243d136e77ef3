#include "cobot/haptics/fivebar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cobot::haptics {

namespace {

std::string fmt_point(Point2 p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", p.x, p.y);
    return buf;
}

bool in_limits(const FiveBarConfig& cfg, double theta) {
    return theta >= cfg.servo_min && theta <= cfg.servo_max;
}

// Angle of the proximal link for one side; sign +1 puts the elbow left of ground->p.
std::optional<double> side_angle(const FiveBarConfig& cfg, Point2 ground, Point2 p, double sign) {
    const double dx = p.x - ground.x, dy = p.y - ground.y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0 || r > cfg.l1 + cfg.l2 || r < std::abs(cfg.l1 - cfg.l2)) {
        return std::nullopt;
    }
    const double c = (cfg.l1 * cfg.l1 + r * r - cfg.l2 * cfg.l2) / (2.0 * cfg.l1 * r);
    const double beta = std::acos(std::clamp(c, -1.0, 1.0));
    return std::atan2(dy, dx) + sign * beta;
}

std::optional<ServoPair> try_ik(const FiveBarConfig& cfg, Point2 p) {
    const Point2 a0{-cfg.base_width / 2, 0.0}, b0{cfg.base_width / 2, 0.0};
    const auto t1 = side_angle(cfg, a0, p, +1.0);
    const auto t2 = side_angle(cfg, b0, p, -1.0);
    if (!t1 || !t2 || !in_limits(cfg, *t1) || !in_limits(cfg, *t2)) {
        return std::nullopt;
    }
    const ServoPair sp{*t1, *t2};
    // The upper-branch FK has to land back on p, otherwise p sits on the other assembly.
    try {
        const auto back = fivebar_fk(cfg, sp);
        if (std::hypot(back.x - p.x, back.y - p.y) > 1e-7) {
            return std::nullopt;
        }
    } catch (const FiveBarUnreachable&) {
        return std::nullopt;
    }
    return sp;
}

} // namespace

FiveBarUnreachable::FiveBarUnreachable(const std::string& what, std::optional<Point2> nearest)
    : Error("E_UNREACHABLE", what), nearest_(nearest) {}

Point2 contact_to_target(const FiveBarConfig& cfg, const ContactState& c) {
    if (!(c.s >= 0.0 && c.s <= 1.0 && c.f >= 0.0 && c.f <= 1.0)) {
        throw Error("E_RANGE", "contact s and f must lie in [0, 1]");
    }
    return {(c.s - 0.5) * cfg.finger_span, cfg.rest_height - c.f * cfg.depth_range};
}

void validate(const FiveBarConfig& cfg) {
    if (!(cfg.base_width > 0 && cfg.l1 > 0 && cfg.l2 > 0 && cfg.finger_span > 0 && cfg.depth_range > 0)) {
        throw Error("E_CONFIG", "five-bar sizes must be positive");
    }
    if (!(cfg.servo_min < cfg.servo_max)) {
        throw Error("E_CONFIG", "servo limit min must be below max");
    }
    for (double s : {0.0, 1.0}) {
        for (double f : {0.0, 1.0}) {
            const auto p = contact_to_target(cfg, {s, f});
            if (!try_ik(cfg, p)) {
                throw Error("E_CONFIG", "contact corner " + fmt_point(p) + " mm is outside the five-bar workspace");
            }
        }
    }
}

FiveBarConfig fivebar_config_from_json(const nlohmann::json& j) {
    FiveBarConfig c;
    try {
        c.base_width = j.value("base_width", c.base_width);
        c.l1 = j.value("l1", c.l1);
        c.l2 = j.value("l2", c.l2);
        if (j.contains("servo_limits_deg")) {
            constexpr double deg = 3.14159265358979323846 / 180.0;
            c.servo_min = j["servo_limits_deg"].at(0).get<double>() * deg;
            c.servo_max = j["servo_limits_deg"].at(1).get<double>() * deg;
        }
        c.finger_span = j.value("finger_span", c.finger_span);
        c.rest_height = j.value("rest_height", c.rest_height);
        c.depth_range = j.value("depth_range", c.depth_range);
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_CONFIG", std::string("bad five-bar config: ") + e.what());
    }
    validate(c);
    return c;
}

nlohmann::json to_json(const FiveBarConfig& cfg) {
    constexpr double deg = 180.0 / 3.14159265358979323846;
    return {{"base_width", cfg.base_width},
            {"l1", cfg.l1},
            {"l2", cfg.l2},
            {"servo_limits_deg", {cfg.servo_min * deg, cfg.servo_max * deg}},
            {"finger_span", cfg.finger_span},
            {"rest_height", cfg.rest_height},
            {"depth_range", cfg.depth_range}};
}

Point2 fivebar_fk(const FiveBarConfig& cfg, const ServoPair& sp) {
    if (!in_limits(cfg, sp.theta1) || !in_limits(cfg, sp.theta2)) {
        throw Error("E_SERVO_LIMIT", "servo angle outside limits");
    }
    const Point2 e1{-cfg.base_width / 2 + cfg.l1 * std::cos(sp.theta1), cfg.l1 * std::sin(sp.theta1)};
    const Point2 e2{cfg.base_width / 2 + cfg.l1 * std::cos(sp.theta2), cfg.l1 * std::sin(sp.theta2)};
    const double dx = e2.x - e1.x, dy = e2.y - e1.y;
    const double dist = std::hypot(dx, dy);
    if (dist == 0.0 || dist > 2.0 * cfg.l2) {
        throw FiveBarUnreachable("elbows " + fmt_point(e1) + " and " + fmt_point(e2) +
                                 " cannot be joined by the distal links");
    }
    const double h = std::sqrt(std::max(0.0, cfg.l2 * cfg.l2 - dist * dist / 4.0));
    const Point2 mid{(e1.x + e2.x) / 2, (e1.y + e2.y) / 2};
    const double nx = -dy / dist, ny = dx / dist;
    const Point2 a{mid.x + h * nx, mid.y + h * ny};
    const Point2 b{mid.x - h * nx, mid.y - h * ny};
    return a.y >= b.y ? a : b;
}

bool reachable(const FiveBarConfig& cfg, Point2 p) {
    return try_ik(cfg, p).has_value();
}

ServoPair fivebar_ik(const FiveBarConfig& cfg, Point2 p) {
    if (const auto sp = try_ik(cfg, p)) {
        return *sp;
    }
    const Point2 rest{0.0, cfg.rest_height};
    std::optional<Point2> nearest;
    if (try_ik(cfg, rest)) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = (lo + hi) / 2;
            (try_ik(cfg, {rest.x + mid * (p.x - rest.x), rest.y + mid * (p.y - rest.y)}) ? lo : hi) = mid;
        }
        nearest = Point2{rest.x + lo * (p.x - rest.x), rest.y + lo * (p.y - rest.y)};
    }
    throw FiveBarUnreachable("point " + fmt_point(p) + " mm is outside the five-bar workspace" +
                                 (nearest ? "; nearest reachable " + fmt_point(*nearest) : std::string()),
                             nearest);
}

nlohmann::json to_json(const ServoPair& sp) {
    return {{"theta1", sp.theta1}, {"theta2", sp.theta2}};
}

nlohmann::json to_json(const ContactState& c) {
    return {{"s", c.s}, {"f", c.f}};
}

} // namespace cobot::haptics
