#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cobot/haptics/fivebar.hpp"
#include "cobot/haptics/pattern.hpp"

using namespace cobot::haptics;
using cobot::Point2;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Checks the linkage constraints directly: proximal lengths are built in, so the
// distal links must both measure l2 and each elbow must sit on its outer side.
void check_linkage(const FiveBarConfig& cfg, const ServoPair& sp, Point2 p) {
    const Point2 a0{-cfg.base_width / 2, 0}, b0{cfg.base_width / 2, 0};
    const Point2 e1{a0.x + cfg.l1 * std::cos(sp.theta1), cfg.l1 * std::sin(sp.theta1)};
    const Point2 e2{b0.x + cfg.l1 * std::cos(sp.theta2), cfg.l1 * std::sin(sp.theta2)};
    REQUIRE(std::abs(dist(e1, p) - cfg.l2) <= 1e-9);
    REQUIRE(std::abs(dist(e2, p) - cfg.l2) <= 1e-9);
    const double cross_left = (p.x - a0.x) * (e1.y - a0.y) - (p.y - a0.y) * (e1.x - a0.x);
    const double cross_right = (p.x - b0.x) * (e2.y - b0.y) - (p.y - b0.y) * (e2.x - b0.x);
    REQUIRE(cross_left > 0.0);
    REQUIRE(cross_right < 0.0);
}

std::vector<Point2> workspace_grid() {
    std::vector<Point2> pts;
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 20; ++j) {
            pts.push_back({-14.0 + 28.0 * i / 24.0, 24.0 + 16.0 * j / 19.0});
        }
    }
    return pts;
}

} // namespace

TEST_CASE("five-bar forward kinematics") {
    const FiveBarConfig cfg;
    const auto p = fivebar_fk(cfg, {90 * deg, 90 * deg});
    CHECK(std::abs(p.x) <= 1e-9);
    CHECK(std::abs(p.y - (25.0 + std::sqrt(625.0 - 225.0))) <= 1e-9);
    CHECK(std::abs(p.y - 45.0) <= 1e-9);

    const auto q = fivebar_fk(cfg, {80 * deg, 120 * deg});
    const auto m = fivebar_fk(cfg, {pi - 120 * deg, pi - 80 * deg});
    CHECK(std::abs(q.x + m.x) <= 1e-9);
    CHECK(std::abs(q.y - m.y) <= 1e-9);

    const double phi = std::acos(0.42);
    try {
        fivebar_fk(cfg, {pi - phi, phi});
        FAIL("expected unreachable");
    } catch (const FiveBarUnreachable& e) {
        CHECK(std::string(e.code()) == "E_UNREACHABLE");
    }
    CHECK_THROWS_AS(fivebar_fk(cfg, {5 * deg, 90 * deg}), cobot::Error);
}

TEST_CASE("five-bar inverse kinematics") {
    const FiveBarConfig cfg;
    const auto sp = fivebar_ik(cfg, {0, 45});
    CHECK(std::abs(sp.theta1 - pi / 2) <= 1e-9);
    CHECK(std::abs(sp.theta2 - pi / 2) <= 1e-9);

    for (double y : {30.0, 36.0, 42.0}) {
        const auto s = fivebar_ik(cfg, {0, y});
        CHECK(std::abs(s.theta2 - (pi - s.theta1)) <= 1e-12);
    }
}

TEST_CASE("IK then FK round trip over a 500-point workspace grid") {
    const FiveBarConfig cfg;
    const auto grid = workspace_grid();
    REQUIRE(grid.size() == 500);
    double worst = 0.0;
    for (const auto& p : grid) {
        const auto sp = fivebar_ik(cfg, p);
        check_linkage(cfg, sp, p);
        worst = std::max(worst, dist(fivebar_fk(cfg, sp), p));
    }
    MESSAGE("worst round trip " << worst << " mm");
    CHECK(worst < 1e-9);
}

TEST_CASE("out-of-workspace IK reports the nearest reachable point") {
    const FiveBarConfig cfg;
    try {
        fivebar_ik(cfg, {0, 60});
        FAIL("expected unreachable");
    } catch (const FiveBarUnreachable& e) {
        REQUIRE(e.nearest());
        const auto n = *e.nearest();
        CHECK(std::abs(n.x) <= 1e-9);
        CHECK(reachable(cfg, n));
        CHECK_FALSE(reachable(cfg, {0, n.y + 1e-6}));
        // along x = 0 the limit is the distal reach: 15^2 + y^2 = 50^2
        CHECK(std::abs(n.y - std::sqrt(2500.0 - 225.0)) <= 1e-6);
    }
}

TEST_CASE("contact mapping") {
    const FiveBarConfig cfg;
    CHECK(contact_to_target(cfg, {0.5, 0}) == Point2{0, cfg.rest_height});
    CHECK(contact_to_target(cfg, {1, 1}) == Point2{cfg.finger_span / 2, cfg.rest_height - cfg.depth_range});
    double last_x = -1e9;
    for (int i = 0; i <= 100; ++i) {
        const auto p = contact_to_target(cfg, {i / 100.0, 0.3});
        CHECK(p.x > last_x);
        CHECK(p.y == doctest::Approx(cfg.rest_height - 0.3 * cfg.depth_range));
        last_x = p.x;
    }
    CHECK_THROWS_AS(contact_to_target(cfg, {1.2, 0}), cobot::Error);

    FiveBarConfig bad = cfg;
    bad.rest_height = 49.0;
    CHECK_THROWS_AS(validate(bad), cobot::Error);
    CHECK_NOTHROW(validate(cfg));
    CHECK(fivebar_config_from_json(to_json(cfg)).servo_max == doctest::Approx(cfg.servo_max));
}

TEST_CASE("pattern sampling") {
    TactilePattern p{1, "ramp", 2.0, {{0.0, {0, 0.2}}, {2.0, {1, 0.2}}}, {{0.0, {1, 0}}, {2.0, {0, 0}}}};
    CHECK(pattern_sample(p, 0.0).thumb == p.thumb.front().c);
    CHECK(pattern_sample(p, 2.0).index == p.index.back().c);
    CHECK(pattern_sample(p, 0.5).thumb.s == doctest::Approx(0.25));
    CHECK_THROWS_AS(pattern_sample(p, 2.01), cobot::Error);
    CHECK_THROWS_AS(pattern_sample(p, -0.01), cobot::Error);

    TactilePattern clamp{2, "late", 2.0, {{0.5, {0.2, 0.1}}, {1.0, {0.4, 0.1}}}, {{1.0, {0.7, 0.3}}}};
    CHECK(pattern_sample(clamp, 0.1).thumb.s == 0.2);
    CHECK(pattern_sample(clamp, 1.9).thumb.s == 0.4);
    CHECK(pattern_sample(clamp, 0.0).index.s == 0.7);
}

TEST_CASE("rotation patterns") {
    const auto cw = make_rotation_pattern(Rotation::CW, 2.0);
    const auto ccw = make_rotation_pattern(Rotation::CCW, 2.0);
    CHECK(pattern_sample(cw, 0).thumb.s == 0.0);
    CHECK(pattern_sample(cw, 0).index.s == 1.0);
    for (int i = 0; i <= 200; ++i) {
        const double t = i * 0.01;
        const auto a = pattern_sample(cw, t), b = pattern_sample(ccw, t);
        REQUIRE(std::abs(b.thumb.s - (1 - a.thumb.s)) <= 1e-12);
        REQUIRE(std::abs(b.index.s - (1 - a.index.s)) <= 1e-12);
        REQUIRE(a.thumb.f == kSlideForce);
    }
    const auto start = pattern_sample(cw, 0);
    const auto end = pattern_sample(ccw, ccw.duration);
    CHECK(std::abs(end.thumb.s - start.thumb.s) <= 1e-12);
    CHECK(std::abs(end.index.s - start.index.s) <= 1e-12);
    CHECK(pattern_sample(cw, cw.duration).thumb.s == pattern_sample(ccw, 0).thumb.s);
}

TEST_CASE("default pattern set") {
    const auto set = default_pattern_set();
    REQUIRE(set.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(set[i].id == i + 1);
        CHECK(set[i].duration == 2.0);
        CHECK_NOTHROW(validate(set[i]));
    }
    auto same = [](const TactilePattern& a, const TactilePattern& b) {
        for (int i = 0; i <= 100; ++i) {
            const double t = a.duration * i / 100.0;
            const auto x = pattern_sample(a, t), y = pattern_sample(b, t);
            if (!(x.thumb == y.thumb && x.index == y.index)) return false;
        }
        return true;
    };
    CHECK(same(swap_channels(set[0]), set[0]));
    CHECK(same(swap_channels(set[2]), set[3]));
    CHECK(same(swap_channels(set[4]), set[5]));
    CHECK(same(set[6], make_rotation_pattern(Rotation::CW, 2.0)));
    CHECK(same(set[7], make_rotation_pattern(Rotation::CCW, 2.0)));
    CHECK_FALSE(same(set[0], set[1]));

    // sequential: index leads, thumb follows
    CHECK(pattern_sample(set[4], 0.4).index.s > 0.4);
    CHECK(pattern_sample(set[4], 0.4).thumb.f == 0.0);
    CHECK(pattern_sample(set[4], 1.5).thumb.s > 0.4);
    CHECK(pattern_sample(set[4], 1.5).index.f == 0.0);

    const auto back = patterns_from_json(nlohmann::json::array({to_json(set[4]), to_json(set[6])}));
    CHECK(same(back[0], set[4]));
    CHECK(same(back[1], set[6]));
    auto broken = to_json(set[0]);
    broken["channels"]["thumb"][0]["t"] = 3.0;
    CHECK_THROWS_AS(pattern_from_json(broken), cobot::Error);
}

TEST_CASE("servo streams") {
    const FiveBarConfig cfg;
    const auto set = default_pattern_set();
    CHECK(servo_stream(cfg, cfg, set[0], 50.0).size() == 101);
    CHECK(servo_stream(cfg, cfg, set[0], 30.0).size() == 61);

    TactilePattern constant{1, "hold", 2.0, {{0.0, {0.3, 0.5}}}, {{0.0, {0.8, 0.1}}}};
    const auto flat = servo_stream(cfg, cfg, constant, 50.0);
    for (const auto& s : flat) {
        REQUIRE(std::abs(s.thumb.theta1 - flat[0].thumb.theta1) <= 1e-12);
        REQUIRE(std::abs(s.index.theta2 - flat[0].index.theta2) <= 1e-12);
    }

    double worst_step = 0.0, worst_rt = 0.0;
    for (const auto& p : set) {
        const auto stream = servo_stream(cfg, cfg, p, 50.0);
        for (std::size_t k = 0; k < stream.size(); ++k) {
            const auto c = pattern_sample(p, stream[k].t);
            const auto pt = contact_to_target(cfg, c.thumb), pi_ = contact_to_target(cfg, c.index);
            check_linkage(cfg, stream[k].thumb, pt);
            check_linkage(cfg, stream[k].index, pi_);
            worst_rt = std::max({worst_rt, dist(fivebar_fk(cfg, stream[k].thumb), pt),
                                 dist(fivebar_fk(cfg, stream[k].index), pi_)});
            if (k > 0) {
                worst_step = std::max({worst_step, std::abs(stream[k].thumb.theta1 - stream[k - 1].thumb.theta1),
                                       std::abs(stream[k].thumb.theta2 - stream[k - 1].thumb.theta2),
                                       std::abs(stream[k].index.theta1 - stream[k - 1].index.theta1),
                                       std::abs(stream[k].index.theta2 - stream[k - 1].index.theta2)});
            }
        }
    }
    MESSAGE("max servo step " << worst_step << " rad, max round trip " << worst_rt << " mm");
    CHECK(worst_step < 0.2);
    CHECK(worst_rt < 1e-9);

    FiveBarConfig narrow = cfg;
    narrow.finger_span = 200.0;
    try {
        servo_stream(narrow, cfg, set[0], 50.0);
        FAIL("expected unreachable");
    } catch (const FiveBarUnreachable& e) {
        CHECK(std::string(e.what()).find("t = 0") != std::string::npos);
    }
}

TEST_CASE("player") {
    Player player;
    CHECK_FALSE(player.step(0.02));
    player.start(make_rotation_pattern(Rotation::CW, 1.0), false);
    int samples = 0;
    while (player.step(0.02)) ++samples;
    CHECK(samples == 51);
    CHECK_FALSE(player.active());

    player.start(make_rotation_pattern(Rotation::CCW, 1.0), true);
    for (int i = 0; i < 500; ++i) REQUIRE(player.step(0.02));
    CHECK(player.pattern_id() == 8);
    player.stop();
    CHECK_FALSE(player.active());
}
