#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cobot/point.hpp"

namespace cobot::gesture {

inline constexpr std::size_t kLandmarkCount = 21;

/// Landmark indices of the 21-point hand model (wrist, then four joints per
/// finger from base to tip).
namespace lm {
inline constexpr int kWrist = 0;
inline constexpr int kThumbCmc = 1;
inline constexpr int kThumbMcp = 2;
inline constexpr int kThumbIp = 3;
inline constexpr int kThumbTip = 4;
inline constexpr int kIndexMcp = 5;
inline constexpr int kIndexPip = 6;
inline constexpr int kIndexTip = 8;
inline constexpr int kMiddleMcp = 9;
inline constexpr int kRingMcp = 13;
inline constexpr int kPinkyMcp = 17;

/// MCP landmark of finger 1..4 (index..pinky).
constexpr int mcp(int finger) { return 1 + 4 * finger; }
constexpr int pip(int finger) { return mcp(finger) + 1; }
constexpr int dip(int finger) { return mcp(finger) + 2; }
constexpr int tip(int finger) { return mcp(finger) + 3; }
} // namespace lm

struct Landmark {
    double x = 0.0; ///< normalized image x in [0,1]
    double y = 0.0; ///< normalized image y in [0,1]
    double z = 0.0; ///< relative depth, dimensionless

    bool operator==(const Landmark&) const = default;
};

enum class Handedness { Left, Right };

struct HandFrame {
    std::array<Landmark, kLandmarkCount> landmarks{};
    std::int64_t stamp_us = 0;
    Handedness handedness = Handedness::Right;
    double confidence = 1.0;

    bool operator==(const HandFrame&) const = default;
};

using cobot::Point2;

/// Throws E_MALFORMED_FRAME when a landmark lies outside [0,1]² or is not
/// finite, or when confidence is outside [0,1].
void validate(const HandFrame& frame);

/// Parses the JSON-lines frame format. A landmark count other than 21 raises
/// E_MALFORMED_FRAME.
HandFrame frame_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HandFrame& frame);

} // namespace cobot::gesture
