#include "cobot/gesture/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cobot/error.hpp"

namespace cobot::gesture {

namespace {

constexpr std::array<std::string_view, 9> kNames = {"Palm", "One",   "Two", "Three",  "Four",
                                                    "Fist", "Thumb", "Ok",  "Unknown"};

double dist(const Landmark& a, const Landmark& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double angle_deg(const Landmark& a, const Landmark& vertex, const Landmark& c) {
    const double ux = a.x - vertex.x, uy = a.y - vertex.y;
    const double vx = c.x - vertex.x, vy = c.y - vertex.y;
    const double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    const double cosine = std::clamp((ux * vx + uy * vy) / (nu * nv), -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

// Rejects frames that cannot come from a hand: the palm must be compact and
// each finger chain must be coherent with its extension decision.
bool plausible(const HandFrame& f, const FingerState& st, const ClassifierConfig& cfg) {
    const auto& w = f.landmarks[lm::kWrist];
    double lo = 1e300, hi = 0.0;
    for (int finger = 1; finger <= 4; ++finger) {
        const double d = dist(f.landmarks[lm::mcp(finger)], w);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    if (lo <= 0.0 || hi / lo > cfg.max_palm_spread) {
        return false;
    }
    for (int finger = 1; finger <= 4; ++finger) {
        const double d_mcp = dist(f.landmarks[lm::mcp(finger)], w);
        const double d_pip = dist(f.landmarks[lm::pip(finger)], w);
        const double d_dip = dist(f.landmarks[lm::dip(finger)], w);
        const double d_tip = dist(f.landmarks[lm::tip(finger)], w);
        if (st.extended[finger]) {
            if (!(d_mcp < d_pip && d_pip < d_dip && d_dip < d_tip)) {
                return false;
            }
        } else if (!(d_tip < d_pip)) {
            return false;
        }
    }
    return true;
}

} // namespace

std::string_view to_string(GestureClass g) { return kNames[static_cast<std::size_t>(g)]; }

GestureClass gesture_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) {
            return static_cast<GestureClass>(i);
        }
    }
    throw Error("E_UNKNOWN_GESTURE", "unknown gesture '" + std::string(name) + "'");
}

FingerMetrics finger_metrics(const HandFrame& frame) {
    validate(frame);
    const auto& L = frame.landmarks;
    FingerMetrics m;
    for (int finger = 1; finger <= 4; ++finger) {
        const double d_pip = dist(L[lm::pip(finger)], L[lm::kWrist]);
        const double d_tip = dist(L[lm::tip(finger)], L[lm::kWrist]);
        m.extension_ratio[finger - 1] = d_pip > 0.0 ? d_tip / d_pip : 0.0;
    }
    m.thumb_angle_deg = angle_deg(L[lm::kThumbCmc], L[lm::kThumbMcp], L[lm::kThumbIp]);
    return m;
}

namespace {

FingerState extensions_from(const FingerMetrics& m, const ClassifierConfig& cfg) {
    FingerState st;
    st.extended[0] = m.thumb_angle_deg > cfg.thumb_angle_deg;
    for (int i = 0; i < 4; ++i) {
        st.extended[i + 1] = m.extension_ratio[i] > cfg.extension_ratio;
    }
    return st;
}

} // namespace

FingerState finger_extensions(const HandFrame& frame, const ClassifierConfig& cfg) {
    return extensions_from(finger_metrics(frame), cfg);
}

Classification classify(const HandFrame& frame, const ClassifierConfig& cfg) {
    const auto m = finger_metrics(frame);
    const auto st = extensions_from(m, cfg);

    double margin = std::abs(m.thumb_angle_deg - cfg.thumb_angle_deg) / cfg.thumb_angle_deg;
    for (double r : m.extension_ratio) {
        margin = std::min(margin, std::abs(r - cfg.extension_ratio) / cfg.extension_ratio);
    }
    const double score = std::clamp(margin, 0.0, 1.0);

    if (!plausible(frame, st, cfg)) {
        return {GestureClass::Unknown, score};
    }

    const auto& e = st.extended;
    const bool thumb = e[0], index = e[1], middle = e[2], ring = e[3], pinky = e[4];
    GestureClass g = GestureClass::Unknown;
    if (thumb && index && middle && ring && pinky) {
        g = GestureClass::Palm;
    } else if (!thumb && index && !middle && !ring && !pinky) {
        g = GestureClass::One;
    } else if (!thumb && index && middle && !ring && !pinky) {
        g = GestureClass::Two;
    } else if (!thumb && index && middle && ring && !pinky) {
        g = GestureClass::Three;
    } else if (!thumb && index && middle && ring && pinky) {
        g = GestureClass::Four;
    } else if (!thumb && !index && !middle && !ring && !pinky) {
        g = GestureClass::Fist;
    } else if (thumb && !index && !middle && !ring && !pinky) {
        g = GestureClass::Thumb;
    } else if (thumb && index && !middle && !ring && !pinky &&
               dist(frame.landmarks[lm::kThumbTip], frame.landmarks[lm::kIndexTip]) < cfg.ok_tip_distance) {
        g = GestureClass::Ok;
    }
    return {g, score};
}

Point2 index_tip_position(const HandFrame& frame) {
    validate(frame);
    const auto& p = frame.landmarks[lm::kIndexTip];
    return {p.x, p.y};
}

} // namespace cobot::gesture
