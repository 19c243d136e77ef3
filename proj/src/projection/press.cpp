#include "cobot/projection/press.hpp"

namespace cobot::projection {

using gesture::GestureClass;

std::string to_string(const PressState& s) {
    switch (s.kind) {
    case PressState::Kind::Idle: return "Idle";
    case PressState::Kind::Armed: return "Armed{" + std::to_string(s.button) + "}";
    case PressState::Kind::Pressed: return "Pressed{" + std::to_string(s.button) + "}";
    }
    return "?";
}

PressStep press_step(const PanelLayout& layout, const PressState& state, GestureClass g, std::optional<Point2> p,
                     std::int64_t stamp_us, const PressConfig& cfg) {
    const std::optional<int> hover = p ? hit_test(layout, *p) : std::nullopt;

    switch (state.kind) {
    case PressState::Kind::Idle:
        if (g == GestureClass::Palm && hover) {
            return {PressState::armed(*hover), {}};
        }
        return {PressState::idle(), {}};

    case PressState::Kind::Armed:
        if (g == GestureClass::One && hover == state.button) {
            return {PressState::pressed(state.button), {{PressEvent::Kind::Press, state.button, stamp_us}}};
        }
        if (g == GestureClass::Palm && hover) {
            return {PressState::armed(*hover), {}};
        }
        return {PressState::idle(), {}};

    case PressState::Kind::Pressed: {
        const bool still_over =
            p && layout.button(state.button).rect.inflated(cfg.hysteresis_mm).contains(*p);
        if (g == GestureClass::One && still_over) {
            return {state, {}};
        }
        return {PressState::idle(), {{PressEvent::Kind::Release, state.button, stamp_us}}};
    }
    }
    return {PressState::idle(), {}};
}

DisplayModel render_panel_state(const PanelLayout& layout, const PressState& state) {
    DisplayModel m;
    m.width_mm = layout.width_mm;
    m.height_mm = layout.height_mm;
    for (const auto& b : layout.buttons) {
        ButtonView v{b.id, b.label, b.action, b.rect, "idle", kIdleColor};
        if (b.id == state.button && state.kind == PressState::Kind::Armed) {
            v.state = "armed";
            v.color = kArmedColor;
        } else if (b.id == state.button && state.kind == PressState::Kind::Pressed) {
            v.state = "pressed";
            v.color = kPressedColor;
        }
        m.buttons.push_back(std::move(v));
    }
    return m;
}

nlohmann::json to_json(const PressEvent& e) {
    return {{"kind", e.kind == PressEvent::Kind::Press ? "press" : "release"},
            {"button", e.button},
            {"stamp_us", e.stamp_us}};
}

nlohmann::json to_json(const DisplayModel& m) {
    auto buttons = nlohmann::json::array();
    for (const auto& b : m.buttons) {
        buttons.push_back({{"id", b.id},
                           {"label", b.label},
                           {"action", to_string(b.action)},
                           {"rect", {b.rect.x, b.rect.y, b.rect.w, b.rect.h}},
                           {"state", b.state},
                           {"color", b.color}});
    }
    return {{"width_mm", m.width_mm}, {"height_mm", m.height_mm}, {"buttons", std::move(buttons)}};
}

} // namespace cobot::projection
