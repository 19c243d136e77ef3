#include "cobot/projection/panel.hpp"

#include <algorithm>
#include <set>

#include "cobot/error.hpp"

namespace cobot::projection {

namespace {

constexpr std::array<std::string_view, 9> kActionNames = {"JogX+", "JogX-", "JogY+", "JogY-", "JogZ+",
                                                          "JogZ-", "Open",  "Close", "Rotate"};

bool overlaps(const Rect& a, const Rect& b) {
    return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

} // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action action_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kActionNames.size(); ++i) {
        if (kActionNames[i] == s) {
            return static_cast<Action>(i);
        }
    }
    throw Error("E_LAYOUT", "unknown button action '" + std::string(s) + "'");
}

bool is_jog(Action a) {
    return a != Action::Open && a != Action::Close && a != Action::Rotate;
}

const Button& PanelLayout::button(int id) const {
    for (const auto& b : buttons) {
        if (b.id == id) {
            return b;
        }
    }
    throw Error("E_LAYOUT", "no button with id " + std::to_string(id));
}

PanelLayout default_layout() {
    constexpr std::array<std::array<Action, 3>, 3> grid = {{
        {Action::JogXPlus, Action::JogYPlus, Action::JogZPlus},
        {Action::JogXMinus, Action::JogYMinus, Action::JogZMinus},
        {Action::Open, Action::Close, Action::Rotate},
    }};
    constexpr std::array<std::array<std::string_view, 3>, 3> labels = {{
        {"X+", "Y+", "Z+"},
        {"X-", "Y-", "Z-"},
        {"open", "close", "rotate"},
    }};
    PanelLayout layout;
    constexpr double gap = 10.0;
    const double cell_w = layout.width_mm / 3.0;
    const double cell_h = layout.height_mm / 3.0;
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
            Button b;
            b.id = row * 3 + col + 1;
            b.rect = {col * cell_w + gap / 2, row * cell_h + gap / 2, cell_w - gap, cell_h - gap};
            b.label = std::string(labels[row][col]);
            b.action = grid[row][col];
            layout.buttons.push_back(b);
        }
    }
    return layout;
}

void validate(const PanelLayout& layout) {
    if (!(layout.width_mm > 0.0 && layout.height_mm > 0.0)) {
        throw Error("E_LAYOUT", "panel size must be positive");
    }
    if (layout.buttons.size() != 9) {
        throw Error("E_LAYOUT", "layout must have exactly 9 buttons, found " + std::to_string(layout.buttons.size()));
    }
    std::set<int> ids;
    std::multiset<Action> actions;
    for (const auto& b : layout.buttons) {
        ids.insert(b.id);
        actions.insert(b.action);
        if (!(b.rect.w > 0.0 && b.rect.h > 0.0)) {
            throw Error("E_LAYOUT", "button " + std::to_string(b.id) + " has an empty rect");
        }
    }
    if (ids != std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}) {
        throw Error("E_LAYOUT", "button ids must be exactly 1..9");
    }
    for (std::size_t i = 0; i < kActionNames.size(); ++i) {
        if (actions.count(static_cast<Action>(i)) != 1) {
            throw Error("E_LAYOUT", "action " + std::string(kActionNames[i]) + " must appear exactly once");
        }
    }
    for (std::size_t i = 0; i < layout.buttons.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.buttons.size(); ++j) {
            if (overlaps(layout.buttons[i].rect, layout.buttons[j].rect)) {
                throw Error("E_LAYOUT", "buttons " + std::to_string(layout.buttons[i].id) + " and " +
                                            std::to_string(layout.buttons[j].id) + " overlap");
            }
        }
    }
}

PanelLayout layout_from_json(const nlohmann::json& j) {
    PanelLayout layout;
    try {
        layout.width_mm = j.at("width_mm").get<double>();
        layout.height_mm = j.at("height_mm").get<double>();
        for (const auto& jb : j.at("buttons")) {
            Button b;
            b.id = jb.at("id").get<int>();
            const auto& r = jb.at("rect");
            b.rect = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()};
            b.label = jb.value("label", std::string{});
            b.action = action_from_string(jb.at("action").get<std::string>());
            layout.buttons.push_back(b);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_LAYOUT", std::string("bad layout file: ") + e.what());
    }
    validate(layout);
    return layout;
}

nlohmann::json to_json(const PanelLayout& layout) {
    auto buttons = nlohmann::json::array();
    for (const auto& b : layout.buttons) {
        buttons.push_back({{"id", b.id},
                           {"rect", {b.rect.x, b.rect.y, b.rect.w, b.rect.h}},
                           {"label", b.label},
                           {"action", to_string(b.action)}});
    }
    return {{"width_mm", layout.width_mm}, {"height_mm", layout.height_mm}, {"buttons", std::move(buttons)}};
}

std::optional<int> hit_test(const PanelLayout& layout, Point2 p) {
    for (const auto& b : layout.buttons) {
        if (b.rect.contains(p)) {
            return b.id;
        }
    }
    return std::nullopt;
}

} // namespace cobot::projection
