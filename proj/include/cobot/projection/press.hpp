#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/gesture/classifier.hpp"
#include "cobot/projection/panel.hpp"

namespace cobot::projection {

struct PressState {
    enum class Kind { Idle, Armed, Pressed };

    Kind kind = Kind::Idle;
    int button = 0; ///< meaningful for Armed and Pressed

    static PressState idle() { return {}; }
    static PressState armed(int b) { return {Kind::Armed, b}; }
    static PressState pressed(int b) { return {Kind::Pressed, b}; }

    bool operator==(const PressState&) const = default;
};

std::string to_string(const PressState& s);

struct PressEvent {
    enum class Kind { Press, Release };

    Kind kind = Kind::Press;
    int button = 0;
    std::int64_t stamp_us = 0;

    bool operator==(const PressEvent&) const = default;
};

struct PressConfig {
    /// Inflation of the pressed button's hit region, suppressing jitter releases.
    double hysteresis_mm = 3.0;
};

struct PressStep {
    PressState state;
    std::vector<PressEvent> events;
};

/// Palm-then-One press protocol. A Palm frame over button b arms b; a One
/// frame over the armed button presses it; the press holds while the gesture
/// stays One over b (inflated region) and any departure releases it. Other
/// buttons are ignored while one is pressed. `p` is empty when no hand is seen.
PressStep press_step(const PanelLayout& layout, const PressState& state, gesture::GestureClass g,
                     std::optional<Point2> p, std::int64_t stamp_us = 0, const PressConfig& cfg = {});

struct ButtonView {
    int id = 0;
    std::string label;
    Action action = Action::JogXPlus;
    Rect rect;
    std::string state; ///< "idle" | "armed" | "pressed"
    std::string color;
};

struct DisplayModel {
    double width_mm = 0.0;
    double height_mm = 0.0;
    std::vector<ButtonView> buttons;
};

inline constexpr const char* kIdleColor = "#d9d9d9";
inline constexpr const char* kArmedColor = "#f6c85f";
inline constexpr const char* kPressedColor = "#2e7dd7";

DisplayModel render_panel_state(const PanelLayout& layout, const PressState& state);

nlohmann::json to_json(const PressEvent& e);
nlohmann::json to_json(const DisplayModel& m);

} // namespace cobot::projection
