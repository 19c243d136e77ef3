#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "cobot/error.hpp"
#include "cobot/point.hpp"

namespace cobot::haptics {

/// Planar 2-RR closed chain. Ground joints at (-d/2, 0) and (d/2, 0), y up
/// toward the fingertip. Lengths in mm, angles in rad.
struct FiveBarConfig {
    double base_width = 30.0;
    double l1 = 25.0;
    double l2 = 25.0;
    double servo_min = 0.17453292519943295; // 10 deg
    double servo_max = 2.9670597283903604;  // 170 deg
    double finger_span = 20.0;
    double rest_height = 40.0;
    double depth_range = 8.0;
};

struct ServoPair {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

struct ContactState {
    double s = 0.5; ///< position along the fingertip, 0..1
    double f = 0.0; ///< normal force level, 0..1

    bool operator==(const ContactState&) const = default;
};

class FiveBarUnreachable : public Error {
public:
    FiveBarUnreachable(const std::string& what, std::optional<Point2> nearest = std::nullopt);
    const std::optional<Point2>& nearest() const noexcept { return nearest_; }

private:
    std::optional<Point2> nearest_;
};

/// Throws E_CONFIG on non-positive sizes, bad limits or an unreachable contact rectangle.
void validate(const FiveBarConfig& cfg);
FiveBarConfig fivebar_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FiveBarConfig& cfg);

/// Endpoint of the chain, upper (larger y) assembly.
Point2 fivebar_fk(const FiveBarConfig& cfg, const ServoPair& sp);

/// Elbow-out solution: left elbow left of ground->p, right elbow right of it.
/// Throws FiveBarUnreachable carrying the nearest reachable point on the
/// segment from the rest point toward p.
ServoPair fivebar_ik(const FiveBarConfig& cfg, Point2 p);

bool reachable(const FiveBarConfig& cfg, Point2 p);

Point2 contact_to_target(const FiveBarConfig& cfg, const ContactState& c);

nlohmann::json to_json(const ServoPair& sp);
nlohmann::json to_json(const ContactState& c);

} // namespace cobot::haptics
