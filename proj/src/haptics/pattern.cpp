#include "cobot/haptics/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cobot::haptics {

namespace {

ContactState lerp(const ContactState& a, const ContactState& b, double u) {
    return {a.s + (b.s - a.s) * u, a.f + (b.f - a.f) * u};
}

ContactState sample_channel(const std::vector<Keyframe>& ks, double t) {
    if (t <= ks.front().t) {
        return ks.front().c;
    }
    if (t >= ks.back().t) {
        return ks.back().c;
    }
    const auto hi = std::upper_bound(ks.begin(), ks.end(), t, [](double v, const Keyframe& k) { return v < k.t; });
    const auto lo = hi - 1;
    const double span = hi->t - lo->t;
    return span > 0.0 ? lerp(lo->c, hi->c, (t - lo->t) / span) : hi->c;
}

void check_channel(const std::vector<Keyframe>& ks, double duration, const char* name) {
    const std::string ch(name);
    if (ks.empty()) {
        throw Error("E_PATTERN", ch + " channel has no keyframes");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& k = ks[i];
        if (!(k.t >= 0.0 && k.t <= duration)) {
            throw Error("E_PATTERN", ch + " keyframe time outside [0, duration]");
        }
        if (i > 0 && k.t < ks[i - 1].t) {
            throw Error("E_PATTERN", ch + " keyframes are not time-sorted");
        }
        if (!(k.c.s >= 0.0 && k.c.s <= 1.0 && k.c.f >= 0.0 && k.c.f <= 1.0)) {
            throw Error("E_PATTERN", ch + " keyframe s/f outside [0, 1]");
        }
    }
}

std::vector<Keyframe> slide(double duration, double from, double to) {
    return {{0.0, {from, kSlideForce}}, {duration, {to, kSlideForce}}};
}

std::vector<Keyframe> idle(double duration) {
    return {{0.0, {0.5, 0.0}}, {duration, {0.5, 0.0}}};
}

// First finger slides 0->1 then lifts; second finger presses and slides after it.
void sequential(double d, std::vector<Keyframe>& first, std::vector<Keyframe>& second) {
    const double a = 0.45 * d, b = 0.5 * d;
    first = {{0.0, {0.0, kSlideForce}}, {a, {1.0, kSlideForce}}, {b, {1.0, 0.0}}, {d, {1.0, 0.0}}};
    second = {{0.0, {0.0, 0.0}}, {a, {0.0, 0.0}}, {b, {0.0, kSlideForce}}, {d, {1.0, kSlideForce}}};
}

std::vector<Keyframe> channel_from_json(const nlohmann::json& j) {
    std::vector<Keyframe> ks;
    for (const auto& k : j) {
        ks.push_back({k.at("t").get<double>(), {k.at("s").get<double>(), k.at("f").get<double>()}});
    }
    return ks;
}

nlohmann::json channel_to_json(const std::vector<Keyframe>& ks) {
    auto out = nlohmann::json::array();
    for (const auto& k : ks) {
        out.push_back({{"t", k.t}, {"s", k.c.s}, {"f", k.c.f}});
    }
    return out;
}

} // namespace

void validate(const TactilePattern& p) {
    if (p.id < 1 || p.id > 8) {
        throw Error("E_PATTERN", "pattern id must lie in 1..8");
    }
    if (!(p.duration > 0.0)) {
        throw Error("E_PATTERN", "pattern duration must be positive");
    }
    check_channel(p.thumb, p.duration, "thumb");
    check_channel(p.index, p.duration, "index");
}

FingerSample pattern_sample(const TactilePattern& p, double t) {
    if (!(t >= 0.0 && t <= p.duration)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "t = %.6g s outside [0, %.6g]", t, p.duration);
        throw Error("E_RANGE", buf);
    }
    return {sample_channel(p.thumb, t), sample_channel(p.index, t)};
}

TactilePattern make_rotation_pattern(Rotation dir, double duration) {
    if (!(duration > 0.0)) {
        throw Error("E_PATTERN", "pattern duration must be positive");
    }
    TactilePattern p;
    p.duration = duration;
    if (dir == Rotation::CW) {
        p.id = 7;
        p.name = "rotate-cw";
        p.thumb = slide(duration, 0.0, 1.0);
        p.index = slide(duration, 1.0, 0.0);
    } else {
        p.id = 8;
        p.name = "rotate-ccw";
        p.thumb = slide(duration, 1.0, 0.0);
        p.index = slide(duration, 0.0, 1.0);
    }
    return p;
}

TactilePattern swap_channels(const TactilePattern& p) {
    TactilePattern out = p;
    std::swap(out.thumb, out.index);
    return out;
}

std::vector<TactilePattern> default_pattern_set(double d) {
    std::vector<TactilePattern> set(8);
    set[0] = {1, "both-up", d, slide(d, 0.0, 1.0), slide(d, 0.0, 1.0)};
    set[1] = {2, "both-down", d, slide(d, 1.0, 0.0), slide(d, 1.0, 0.0)};
    set[2] = {3, "index-up", d, idle(d), slide(d, 0.0, 1.0)};
    set[3] = {4, "thumb-up", d, slide(d, 0.0, 1.0), idle(d)};
    set[4] = {5, "index-then-thumb", d, {}, {}};
    sequential(d, set[4].index, set[4].thumb);
    set[5] = {6, "thumb-then-index", d, {}, {}};
    sequential(d, set[5].thumb, set[5].index);
    set[6] = make_rotation_pattern(Rotation::CW, d);
    set[7] = make_rotation_pattern(Rotation::CCW, d);
    return set;
}

std::vector<StreamSample> servo_stream(const FiveBarConfig& thumb_cfg, const FiveBarConfig& index_cfg,
                                       const TactilePattern& p, double rate_hz) {
    if (!(rate_hz > 0.0)) {
        throw Error("E_RANGE", "stream rate must be positive");
    }
    const auto n = static_cast<std::size_t>(std::floor(p.duration * rate_hz + 1e-9)) + 1;
    std::vector<StreamSample> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = std::min(p.duration, static_cast<double>(k) / rate_hz);
        const auto c = pattern_sample(p, t);
        try {
            out.push_back({t, fivebar_ik(thumb_cfg, contact_to_target(thumb_cfg, c.thumb)),
                           fivebar_ik(index_cfg, contact_to_target(index_cfg, c.index))});
        } catch (const FiveBarUnreachable& e) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "at t = %.6g s: ", t);
            throw FiveBarUnreachable(buf + std::string(e.what()), e.nearest());
        }
    }
    return out;
}

TactilePattern pattern_from_json(const nlohmann::json& j) {
    TactilePattern p;
    try {
        p.id = j.at("id").get<int>();
        p.name = j.value("name", "pattern-" + std::to_string(p.id));
        p.duration = j.at("duration").get<double>();
        p.thumb = channel_from_json(j.at("channels").at("thumb"));
        p.index = channel_from_json(j.at("channels").at("index"));
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_PATTERN", std::string("bad pattern: ") + e.what());
    }
    validate(p);
    return p;
}

nlohmann::json to_json(const TactilePattern& p) {
    return {{"id", p.id},
            {"name", p.name},
            {"duration", p.duration},
            {"channels", {{"thumb", channel_to_json(p.thumb)}, {"index", channel_to_json(p.index)}}}};
}

std::vector<TactilePattern> patterns_from_json(const nlohmann::json& j) {
    std::vector<TactilePattern> out;
    if (j.is_array()) {
        for (const auto& p : j) {
            out.push_back(pattern_from_json(p));
        }
    } else {
        out.push_back(pattern_from_json(j));
    }
    return out;
}

nlohmann::json to_json(const FingerSample& s) {
    return {{"thumb", to_json(s.thumb)}, {"index", to_json(s.index)}};
}

nlohmann::json to_json(const StreamSample& s) {
    return {{"t", s.t}, {"thumb", to_json(s.thumb)}, {"index", to_json(s.index)}};
}

void Player::start(TactilePattern p, bool loop) {
    validate(p);
    pattern_ = std::move(p);
    loop_ = loop;
    t_ = 0.0;
}

void Player::stop() {
    pattern_.reset();
    t_ = 0.0;
}

std::optional<FingerSample> Player::step(double dt) {
    if (!pattern_) {
        return std::nullopt;
    }
    const auto sample = pattern_sample(*pattern_, std::min(t_, pattern_->duration));
    t_ += std::max(dt, 0.0);
    if (t_ > pattern_->duration + 1e-12) {
        if (loop_) {
            t_ = std::fmod(t_, pattern_->duration);
        } else {
            pattern_.reset();
            t_ = 0.0;
        }
    }
    return sample;
}

} // namespace cobot::haptics
