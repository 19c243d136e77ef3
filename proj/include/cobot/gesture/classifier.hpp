#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "cobot/gesture/hand_frame.hpp"

namespace cobot::gesture {

enum class GestureClass { Palm, One, Two, Three, Four, Fist, Thumb, Ok, Unknown };

std::string_view to_string(GestureClass g);
/// Throws E_UNKNOWN_GESTURE for names that are not a GestureClass.
GestureClass gesture_from_string(std::string_view name);

/// Extension flags ordered thumb, index, middle, ring, pinky.
struct FingerState {
    std::array<bool, 5> extended{};

    bool operator==(const FingerState&) const = default;
};

struct ClassifierConfig {
    /// A finger is extended when |tip - wrist| / |pip - wrist| exceeds this.
    double extension_ratio = 1.30;
    /// The thumb is extended when the CMC-MCP-IP angle exceeds this (degrees).
    double thumb_angle_deg = 150.0;
    /// Maximum thumb-tip to index-tip distance (normalized image units) for Ok.
    double ok_tip_distance = 0.05;
    /// Plausibility gate: the four finger MCPs must lie at comparable distances
    /// from the wrist (max/min ratio at most this).
    double max_palm_spread = 1.6;
};

struct Classification {
    GestureClass gesture = GestureClass::Unknown;
    double score = 0.0; ///< in [0,1]
};

/// Per-finger geometric measurements the decision table is built on.
struct FingerMetrics {
    std::array<double, 4> extension_ratio{}; ///< index..pinky
    double thumb_angle_deg = 0.0;
};

FingerMetrics finger_metrics(const HandFrame& frame);

FingerState finger_extensions(const HandFrame& frame, const ClassifierConfig& cfg = {});

/// Rule-table classifier. Frames failing the hand-plausibility gate classify
/// as Unknown. Score is the smallest normalized margin of any finger from its
/// extension threshold, clamped to [0,1].
Classification classify(const HandFrame& frame, const ClassifierConfig& cfg = {});

/// Landmark 8, validated.
Point2 index_tip_position(const HandFrame& frame);

/// Interface for pluggable gesture models; RuleClassifier wraps classify().
class GestureClassifier {
public:
    virtual ~GestureClassifier() = default;
    virtual Classification classify(const HandFrame& frame) const = 0;
};

class RuleClassifier final : public GestureClassifier {
public:
    explicit RuleClassifier(ClassifierConfig cfg = {}) : cfg_(cfg) {}
    Classification classify(const HandFrame& frame) const override { return gesture::classify(frame, cfg_); }
    const ClassifierConfig& config() const noexcept { return cfg_; }

private:
    ClassifierConfig cfg_;
};

/// Synthetic hand generator: the returned frame classifies as `g` under the
/// default config and its index tip sits exactly at `tip`. Deterministic per
/// seed. Throws E_UNSUPPORTED_GESTURE for Unknown and E_MALFORMED_FRAME when
/// `tip` is outside [0,1]².
HandFrame synth_frame(GestureClass g, Point2 tip, std::uint64_t seed);

} // namespace cobot::gesture
