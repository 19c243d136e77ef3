#include <cmath>
#include <numbers>
#include <random>

#include "cobot/error.hpp"
#include "cobot/gesture/classifier.hpp"

namespace cobot::gesture {

namespace {

// Hand-local coordinates: `a` runs from the wrist towards the fingertips,
// `b` runs laterally towards the thumb side. Unit: roughly one hand length.
struct Local {
    double a = 0.0;
    double b = 0.0;
};

constexpr std::array<double, 5> kFingerB = {0.0, 0.15, 0.05, -0.05, -0.15};
constexpr std::array<double, 5> kFingerLength = {0.0, 1.0, 1.05, 0.97, 0.82};

std::array<Local, kLandmarkCount> hand_pose(GestureClass g) {
    std::array<bool, 5> ext{};
    bool ok_pinch = false;
    switch (g) {
    case GestureClass::Palm: ext = {true, true, true, true, true}; break;
    case GestureClass::One: ext = {false, true, false, false, false}; break;
    case GestureClass::Two: ext = {false, true, true, false, false}; break;
    case GestureClass::Three: ext = {false, true, true, true, false}; break;
    case GestureClass::Four: ext = {false, true, true, true, true}; break;
    case GestureClass::Fist: ext = {false, false, false, false, false}; break;
    case GestureClass::Thumb: ext = {true, false, false, false, false}; break;
    case GestureClass::Ok:
        ext = {true, true, false, false, false};
        ok_pinch = true;
        break;
    case GestureClass::Unknown:
        throw Error("E_UNSUPPORTED_GESTURE", "cannot synthesize the Unknown gesture");
    }

    std::array<Local, kLandmarkCount> p{};
    p[lm::kWrist] = {0.0, 0.0};
    for (int finger = 1; finger <= 4; ++finger) {
        const double b = kFingerB[finger];
        const double len = kFingerLength[finger];
        p[lm::mcp(finger)] = {0.40, b};
        if (ext[finger]) {
            p[lm::pip(finger)] = {0.40 + 0.15 * len, b};
            p[lm::dip(finger)] = {0.40 + 0.32 * len, b};
            p[lm::tip(finger)] = {0.40 + 0.50 * len, b};
        } else {
            // curled into the palm
            p[lm::pip(finger)] = {0.52, b * 0.9};
            p[lm::dip(finger)] = {0.38, b * 0.7};
            p[lm::tip(finger)] = {0.26, b * 0.5};
        }
    }

    const Local cmc{0.12, 0.20};
    const Local mcp{0.25, 0.35};
    p[lm::kThumbCmc] = cmc;
    p[lm::kThumbMcp] = mcp;
    if (ok_pinch) {
        // Straight thumb whose tip lands just beside the index tip.
        const Local target{p[lm::kIndexTip].a - 0.01, p[lm::kIndexTip].b + 0.02};
        const Local dir{target.a - cmc.a, target.b - cmc.b};
        p[lm::kThumbMcp] = {cmc.a + 0.35 * dir.a, cmc.b + 0.35 * dir.b};
        p[lm::kThumbIp] = {cmc.a + 0.70 * dir.a, cmc.b + 0.70 * dir.b};
        p[lm::kThumbTip] = target;
    } else if (ext[0]) {
        const double da = mcp.a - cmc.a, db = mcp.b - cmc.b;
        const double n = std::hypot(da, db);
        p[lm::kThumbIp] = {mcp.a + 0.15 * da / n, mcp.b + 0.15 * db / n};
        p[lm::kThumbTip] = {mcp.a + 0.28 * da / n, mcp.b + 0.28 * db / n};
    } else {
        // folded across the palm
        p[lm::kThumbIp] = {0.36, 0.24};
        p[lm::kThumbTip] = {0.34, 0.10};
    }
    return p;
}

// Portable uniform draw in [-1, 1) from raw engine output.
double unit_jitter(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

} // namespace

HandFrame synth_frame(GestureClass g, Point2 tip, std::uint64_t seed) {
    if (!(tip.x >= 0.0 && tip.x <= 1.0 && tip.y >= 0.0 && tip.y <= 1.0)) {
        throw Error("E_MALFORMED_FRAME", "requested tip lies outside the normalized image");
    }
    auto local = hand_pose(g);

    constexpr double kJitter = 0.008;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < local.size(); ++i) {
        const double ja = unit_jitter(rng) * kJitter;
        const double jb = unit_jitter(rng) * kJitter;
        if (static_cast<int>(i) != lm::kIndexTip) {
            local[i].a += ja;
            local[i].b += jb;
        }
    }
    const Local anchor = local[lm::kIndexTip];

    // Upright first, then progressively rotated and shrunk until every landmark
    // lands inside the image.
    constexpr std::array<double, 11> kScales = {0.25, 0.2, 0.16, 0.12, 0.1, 0.08, 0.06, 0.045, 0.03, 0.02, 0.01};
    for (double scale : kScales) {
        for (int k = 0; k <= 24; ++k) {
            const int step = (k + 1) / 2 * (k % 2 == 1 ? 1 : -1);
            const double heading = -std::numbers::pi / 2 + step * std::numbers::pi / 12;
            const double dax = std::cos(heading), day = std::sin(heading);
            const double dbx = day, dby = -dax; // `a` turned by -90 degrees

            HandFrame f;
            f.handedness = Handedness::Right;
            f.confidence = 1.0;
            bool inside = true;
            for (std::size_t i = 0; i < local.size() && inside; ++i) {
                const double a = local[i].a - anchor.a;
                const double b = local[i].b - anchor.b;
                Landmark& out = f.landmarks[i];
                if (static_cast<int>(i) == lm::kIndexTip) {
                    out = {tip.x, tip.y, 0.0};
                    continue;
                }
                out.x = tip.x + scale * (a * dax + b * dbx);
                out.y = tip.y + scale * (a * day + b * dby);
                out.z = -0.05 * local[i].a;
                inside = out.x >= 0.0 && out.x <= 1.0 && out.y >= 0.0 && out.y <= 1.0;
            }
            if (inside) {
                return f;
            }
        }
    }
    throw Error("E_MALFORMED_FRAME", "no hand placement fits the image with the tip at (" + std::to_string(tip.x) +
                                         ", " + std::to_string(tip.y) + ")");
}

} // namespace cobot::gesture
