#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "cobot/bus/broker.hpp"
#include "cobot/gesture/classifier.hpp"
#include "cobot/haptics/pattern.hpp"
#include "cobot/harness/config.hpp"
#include "cobot/projection/press.hpp"

namespace cobot::harness {

namespace topics {
inline constexpr std::string_view kHandFrames = "hand/frames";
inline constexpr std::string_view kGestureState = "gesture/state";
inline constexpr std::string_view kButtonEvents = "gui/button_events";
inline constexpr std::string_view kPanelState = "gui/panel_state";
inline constexpr std::string_view kRobotState = "robot/state";
inline constexpr std::string_view kRobotFault = "robot/fault";
inline constexpr std::string_view kSceneState = "scene/state";
inline constexpr std::string_view kHapticTrigger = "haptics/trigger";
inline constexpr std::string_view kHapticPlay = "haptics/play";
inline constexpr std::string_view kHapticServo = "haptics/servo";
inline constexpr std::string_view kHapticContact = "haptics/contact";
inline constexpr std::string_view kStudyTlx = "study/tlx";
} // namespace topics

/// "hand/frames" -> "gesture/state" {class, score, tip}. Malformed frames
/// classify as Unknown with a null tip.
class GestureNode {
public:
    GestureNode(bus::Broker& broker, const gesture::GestureClassifier& classifier);
    ~GestureNode();

private:
    bus::Broker& broker_;
    const gesture::GestureClassifier& classifier_;
    bus::ClientId id_;
};

/// "gesture/state" -> "gui/button_events" + "gui/panel_state". The fingertip
/// is mapped from camera to panel coordinates before the press protocol runs.
class ProjectionNode {
public:
    ProjectionNode(bus::Broker& broker, const SystemConfig& cfg);
    ~ProjectionNode();

private:
    void on_gesture(const bus::BusMessage& msg);

    bus::Broker& broker_;
    projection::PanelLayout layout_;
    projection::Homography camera_to_panel_;
    projection::PressState state_;
    bool published_ = false;
    bus::ClientId id_;
};

/// Hold-to-act robot controller. A pressed button is applied on every clock
/// tick until its Release arrives; the scene is stepped after the robot.
class RobotNode {
public:
    RobotNode(bus::Broker& broker, const SystemConfig& cfg);
    ~RobotNode();

private:
    void on_event(const bus::BusMessage& msg);
    void on_tick(double dt);

    bus::Broker& broker_;
    robot::RobotConfig robot_cfg_;
    robot::TaskConfig task_;
    projection::PanelLayout layout_;
    robot::RobotState state_;
    robot::SceneState scene_;
    std::optional<projection::Action> active_;
    robot::HapticTrigger trigger_;
    bool fault_reported_ = false;
    bus::ClientId id_;
};

/// Loops the rotation pattern while a trigger is active and plays
/// "haptics/play" requests once; each tick publishes servo angles and contacts.
class HapticsNode {
public:
    HapticsNode(bus::Broker& broker, const SystemConfig& cfg);
    ~HapticsNode();

private:
    void on_tick(double dt);
    /// Publishes the current sample and advances playback by one period.
    void emit();

    bus::Broker& broker_;
    haptics::FiveBarConfig thumb_;
    haptics::FiveBarConfig index_;
    std::vector<haptics::TactilePattern> patterns_;
    haptics::Player player_;
    double period_;
    double accumulated_ = 0.0;
    bus::ClientId id_;
};

/// All primary nodes on one broker.
class NodeSet {
public:
    NodeSet(bus::Broker& broker, const SystemConfig& cfg);

private:
    gesture::RuleClassifier classifier_;
    GestureNode gesture_;
    ProjectionNode projection_;
    RobotNode robot_;
    HapticsNode haptics_;
};

} // namespace cobot::harness
