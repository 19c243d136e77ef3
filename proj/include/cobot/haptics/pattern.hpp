#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/haptics/fivebar.hpp"

namespace cobot::haptics {

struct Keyframe {
    double t = 0.0;
    ContactState c;
};

struct TactilePattern {
    int id = 0;
    std::string name;
    double duration = 2.0;
    std::vector<Keyframe> thumb;
    std::vector<Keyframe> index;
};

struct FingerSample {
    ContactState thumb;
    ContactState index;
};

enum class Rotation { CW, CCW };

inline constexpr double kSlideForce = 0.6;

/// Throws E_PATTERN on empty channels, unsorted or out-of-range keyframes.
void validate(const TactilePattern& p);

/// Per-channel linear interpolation, clamped outside the keyframe span.
FingerSample pattern_sample(const TactilePattern& p, double t);

TactilePattern make_rotation_pattern(Rotation dir, double duration);

TactilePattern swap_channels(const TactilePattern& p);

/// Eight patterns: joint slides up/down, single-finger slides, two sequential
/// slides and the two rotations.
std::vector<TactilePattern> default_pattern_set(double duration = 2.0);

struct StreamSample {
    double t = 0.0;
    ServoPair thumb;
    ServoPair index;
};

/// floor(duration * rate) + 1 samples at 1/rate spacing through IK of the contact targets.
std::vector<StreamSample> servo_stream(const FiveBarConfig& thumb_cfg, const FiveBarConfig& index_cfg,
                                       const TactilePattern& p, double rate_hz);

TactilePattern pattern_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TactilePattern& p);
/// Accepts a single pattern object or an array of them.
std::vector<TactilePattern> patterns_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FingerSample& s);
nlohmann::json to_json(const StreamSample& s);

/// Tick-driven playback of one pattern, optionally looping.
class Player {
public:
    void start(TactilePattern p, bool loop);
    void stop();
    bool active() const { return pattern_.has_value(); }
    int pattern_id() const { return pattern_ ? pattern_->id : 0; }

    /// Sample at the current time, then advance by dt. Empty when idle.
    std::optional<FingerSample> step(double dt);

private:
    std::optional<TactilePattern> pattern_;
    bool loop_ = false;
    double t_ = 0.0;
};

} // namespace cobot::haptics
