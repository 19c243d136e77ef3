#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/point.hpp"

namespace cobot::projection {

enum class Action { JogXPlus, JogXMinus, JogYPlus, JogYMinus, JogZPlus, JogZMinus, Open, Close, Rotate };

std::string_view to_string(Action a);
Action action_from_string(std::string_view s);
bool is_jog(Action a);

/// Axis-aligned rectangle in panel millimetres; contains [x, x+w) x [y, y+h).
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool contains(Point2 p) const { return p.x >= x && p.x < x + w && p.y >= y && p.y < y + h; }
    Rect inflated(double margin) const { return {x - margin, y - margin, w + 2 * margin, h + 2 * margin}; }
    Point2 center() const { return {x + w / 2, y + h / 2}; }
};

struct Button {
    int id = 0; ///< 1..9
    Rect rect;
    std::string label;
    Action action = Action::JogXPlus;
};

struct PanelLayout {
    double width_mm = 300.0;
    double height_mm = 200.0;
    std::vector<Button> buttons;

    const Button& button(int id) const;
};

/// 3x3 grid on a 300x200 mm panel, rows X+ Y+ Z+ / X- Y- Z- / open close rotate.
PanelLayout default_layout();

/// Throws E_LAYOUT unless there are exactly nine buttons with ids 1..9,
/// pairwise disjoint rects inside the panel, six distinct jog actions and one
/// each of Open, Close and Rotate.
void validate(const PanelLayout& layout);

PanelLayout layout_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PanelLayout& layout);

/// Id of the button whose rect contains `p` (min edges inclusive, max edges
/// exclusive), if any.
std::optional<int> hit_test(const PanelLayout& layout, Point2 p);

} // namespace cobot::projection
