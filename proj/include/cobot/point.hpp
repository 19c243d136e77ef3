#pragma once

namespace cobot {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

} // namespace cobot
