#include "cobot/gesture/hand_frame.hpp"

#include <cmath>
#include <string>

#include "cobot/error.hpp"

namespace cobot::gesture {

void validate(const HandFrame& frame) {
    for (std::size_t i = 0; i < frame.landmarks.size(); ++i) {
        const auto& p = frame.landmarks[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) || p.x < 0.0 || p.x > 1.0 ||
            p.y < 0.0 || p.y > 1.0) {
            throw Error("E_MALFORMED_FRAME", "landmark " + std::to_string(i) + " (" + std::to_string(p.x) + ", " +
                                                 std::to_string(p.y) + ") is outside the normalized image");
        }
    }
    if (!(frame.confidence >= 0.0 && frame.confidence <= 1.0)) {
        throw Error("E_MALFORMED_FRAME", "confidence must lie in [0,1]");
    }
}

HandFrame frame_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("landmarks") || !j["landmarks"].is_array()) {
        throw Error("E_MALFORMED_FRAME", "hand frame requires a 'landmarks' array");
    }
    const auto& pts = j["landmarks"];
    if (pts.size() != kLandmarkCount) {
        throw Error("E_MALFORMED_FRAME",
                    "hand frame has " + std::to_string(pts.size()) + " landmarks, expected 21");
    }
    HandFrame f;
    try {
        for (std::size_t i = 0; i < kLandmarkCount; ++i) {
            const auto& p = pts[i];
            if (p.is_array()) {
                f.landmarks[i] = {p.at(0).get<double>(), p.at(1).get<double>(), p.size() > 2 ? p[2].get<double>() : 0.0};
            } else {
                f.landmarks[i] = {p.at("x").get<double>(), p.at("y").get<double>(), p.value("z", 0.0)};
            }
        }
        f.stamp_us = j.value("stamp_us", std::int64_t{0});
        f.confidence = j.value("confidence", 1.0);
        f.handedness = j.value("handedness", std::string("right")) == "left" ? Handedness::Left : Handedness::Right;
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_MALFORMED_FRAME", std::string("bad landmark entry: ") + e.what());
    }
    return f;
}

nlohmann::json to_json(const HandFrame& frame) {
    auto pts = nlohmann::json::array();
    for (const auto& p : frame.landmarks) {
        pts.push_back({p.x, p.y, p.z});
    }
    return {{"landmarks", std::move(pts)},
            {"stamp_us", frame.stamp_us},
            {"handedness", frame.handedness == Handedness::Left ? "left" : "right"},
            {"confidence", frame.confidence}};
}

} // namespace cobot::gesture
