#include "cobot/harness/nodes.hpp"

#include <cmath>

#include "cobot/error.hpp"

namespace cobot::harness {

using bus::BusMessage;
using bus::Json;

namespace {

double tick_seconds(const BusMessage& msg) {
    return static_cast<double>(msg.data.value("dt_us", std::int64_t{0})) * 1e-6;
}

} // namespace

GestureNode::GestureNode(bus::Broker& broker, const gesture::GestureClassifier& classifier)
    : broker_(broker), classifier_(classifier) {
    id_ = broker_.connect_local([this](const BusMessage& msg) {
        Json out = {{"class", "Unknown"}, {"score", 0.0}, {"tip", nullptr}};
        try {
            const auto frame = gesture::frame_from_json(msg.data);
            const auto c = classifier_.classify(frame);
            const auto tip = gesture::index_tip_position(frame);
            out = {{"class", gesture::to_string(c.gesture)}, {"score", c.score}, {"tip", {tip.x, tip.y}}};
        } catch (const Error&) {
        }
        broker_.publish(id_, topics::kGestureState, std::move(out));
    });
    broker_.subscribe(id_, topics::kHandFrames);
}

GestureNode::~GestureNode() {
    broker_.disconnect(id_);
}

ProjectionNode::ProjectionNode(bus::Broker& broker, const SystemConfig& cfg)
    : broker_(broker), layout_(cfg.layout), camera_to_panel_(camera_to_panel(cfg)) {
    id_ = broker_.connect_local([this](const BusMessage& msg) { on_gesture(msg); });
    broker_.subscribe(id_, topics::kGestureState);
}

ProjectionNode::~ProjectionNode() {
    broker_.disconnect(id_);
}

void ProjectionNode::on_gesture(const BusMessage& msg) {
    auto g = gesture::GestureClass::Unknown;
    std::optional<Point2> p;
    try {
        g = gesture::gesture_from_string(msg.data.at("class").get<std::string>());
        const auto& tip = msg.data.at("tip");
        if (tip.is_array()) {
            p = projection::project_point(camera_to_panel_, {tip.at(0).get<double>(), tip.at(1).get<double>()});
        }
    } catch (const std::exception&) {
        g = gesture::GestureClass::Unknown;
        p.reset();
    }
    const auto step = projection::press_step(layout_, state_, g, p, msg.stamp_us);
    for (const auto& e : step.events) {
        auto data = projection::to_json(e);
        data["action"] = projection::to_string(layout_.button(e.button).action);
        broker_.publish(id_, topics::kButtonEvents, std::move(data));
    }
    if (!published_ || !(step.state == state_)) {
        state_ = step.state;
        published_ = true;
        broker_.publish(id_, topics::kPanelState, projection::to_json(projection::render_panel_state(layout_, state_)));
    }
}

RobotNode::RobotNode(bus::Broker& broker, const SystemConfig& cfg)
    : broker_(broker),
      robot_cfg_(cfg.robot),
      task_(cfg.task),
      layout_(cfg.layout),
      state_(robot::make_state(cfg.robot, robot::home_joints())),
      scene_(cfg.scene) {
    trigger_.direction = task_.wrist_rate > 0 ? robot::RotationDirection::CW : robot::RotationDirection::CCW;
    id_ = broker_.connect_local([this](const BusMessage& msg) {
        if (msg.topic == bus::kTickTopic) {
            on_tick(tick_seconds(msg));
        } else {
            on_event(msg);
        }
    });
    broker_.subscribe(id_, topics::kButtonEvents);
    broker_.subscribe(id_, bus::kTickTopic);
}

RobotNode::~RobotNode() {
    broker_.disconnect(id_);
}

void RobotNode::on_event(const BusMessage& msg) {
    std::optional<projection::Action> action;
    bool press = false;
    try {
        press = msg.data.at("kind").get<std::string>() == "press";
        action = layout_.button(msg.data.at("button").get<int>()).action;
    } catch (const std::exception&) {
        return;
    }
    if (press) {
        active_ = action;
        fault_reported_ = false;
        return;
    }
    if (active_ != action) {
        return;
    }
    if (*active_ == projection::Action::Rotate) {
        auto r = robot::rotate_release(task_, state_);
        state_ = r.state;
        if (!(r.trigger == trigger_)) {
            trigger_ = r.trigger;
            broker_.publish(id_, topics::kHapticTrigger, robot::to_json(trigger_));
        }
    }
    active_.reset();
}

void RobotNode::on_tick(double dt) {
    using projection::Action;
    if (active_) {
        const Action a = *active_;
        if (projection::is_jog(a)) {
            static constexpr robot::Axis axes[] = {robot::Axis::XPlus, robot::Axis::XMinus, robot::Axis::YPlus,
                                                   robot::Axis::YMinus, robot::Axis::ZPlus, robot::Axis::ZMinus};
            const auto r = robot::jog_step(robot_cfg_, task_, state_, {axes[static_cast<int>(a)], task_.jog_speed}, dt);
            state_ = r.state;
            if (r.fault && !fault_reported_) {
                fault_reported_ = true;
                broker_.publish(id_, topics::kRobotFault, robot::to_json(*r.fault));
            }
        } else if (a == Action::Open || a == Action::Close) {
            state_ = robot::gripper_step(task_, state_, scene_,
                                         a == Action::Open ? robot::GripperAction::Open : robot::GripperAction::Close,
                                         dt);
        } else if (a == Action::Rotate) {
            const auto r = robot::rotate_step(robot_cfg_, task_, state_, dt);
            state_ = r.state;
            if (!(r.trigger == trigger_)) {
                trigger_ = r.trigger;
                broker_.publish(id_, topics::kHapticTrigger, robot::to_json(trigger_));
            }
            if (!r.trigger.active && !fault_reported_) {
                fault_reported_ = true;
                broker_.publish(id_, topics::kRobotFault,
                                robot::to_json(robot::Fault{"E_JOINT_LIMIT", "wrist rotation reached joint 6 limit"}));
            }
        }
    }
    scene_ = robot::scene_step(scene_, state_, dt);
    broker_.publish(id_, topics::kRobotState, robot::to_json(state_));
    broker_.publish(id_, topics::kSceneState, robot::to_json(scene_));
}

HapticsNode::HapticsNode(bus::Broker& broker, const SystemConfig& cfg)
    : broker_(broker),
      thumb_(cfg.thumb),
      index_(cfg.index),
      patterns_(haptics::default_pattern_set(cfg.pattern_duration_s)),
      period_(1.0 / cfg.stream_rate_hz) {
    id_ = broker_.connect_local([this](const BusMessage& msg) {
        if (msg.topic == bus::kTickTopic) {
            on_tick(tick_seconds(msg));
            return;
        }
        if (msg.topic == topics::kHapticTrigger) {
            const auto t = robot::haptic_trigger_from_json(msg.data);
            if (t.active) {
                const int id = t.direction == robot::RotationDirection::CW ? 7 : 8;
                player_.start(patterns_[id - 1], true);
                emit();
            } else {
                player_.stop();
                broker_.publish(id_, topics::kHapticContact,
                                haptics::to_json(haptics::FingerSample{}));
            }
            return;
        }
        const int id = msg.data.value("pattern", 0);
        if (id >= 1 && id <= static_cast<int>(patterns_.size())) {
            player_.start(patterns_[id - 1], false);
            emit();
        }
    });
    broker_.subscribe(id_, topics::kHapticTrigger);
    broker_.subscribe(id_, topics::kHapticPlay);
    broker_.subscribe(id_, bus::kTickTopic);
}

HapticsNode::~HapticsNode() {
    broker_.disconnect(id_);
}

void HapticsNode::on_tick(double dt) {
    if (!player_.active()) {
        accumulated_ = 0.0;
        return;
    }
    accumulated_ += dt;
    while (accumulated_ + 1e-9 >= period_ && player_.active()) {
        accumulated_ -= period_;
        emit();
    }
}

void HapticsNode::emit() {
    const int pattern = player_.pattern_id();
    const auto sample = player_.step(period_);
    if (!sample) {
        return;
    }
    const auto thumb = haptics::fivebar_ik(thumb_, haptics::contact_to_target(thumb_, sample->thumb));
    const auto index = haptics::fivebar_ik(index_, haptics::contact_to_target(index_, sample->index));
    broker_.publish(id_, topics::kHapticServo,
                    {{"pattern", pattern}, {"thumb", haptics::to_json(thumb)}, {"index", haptics::to_json(index)}});
    broker_.publish(id_, topics::kHapticContact, haptics::to_json(*sample));
}

NodeSet::NodeSet(bus::Broker& broker, const SystemConfig& cfg)
    : gesture_(broker, classifier_), projection_(broker, cfg), robot_(broker, cfg), haptics_(broker, cfg) {}

} // namespace cobot::harness
