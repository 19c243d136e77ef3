#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/bus/session_log.hpp"
#include "cobot/gesture/classifier.hpp"
#include "cobot/harness/config.hpp"

namespace cobot::harness {

inline constexpr std::int64_t kTickUs = 20000; ///< 50 Hz

/// Condition on the latest message of a published topic. `path` is a JSON
/// pointer into its payload.
struct Predicate {
    std::string topic;
    std::string path;
    std::string op; ///< == != < <= > >= approx
    nlohmann::json value;
    double tolerance = 1e-9; ///< for approx

    std::string text() const;
};

struct Step {
    enum class Kind { MoveTip, SetGesture, Wait, Assert };

    double at_s = 0.0;
    Kind kind = Kind::Wait;
    Point2 tip;                                ///< MoveTip, panel mm
    std::optional<gesture::GestureClass> hand; ///< SetGesture; empty hides the hand
    double dt = 0.0;                           ///< Wait
    Predicate predicate;                       ///< Assert
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    double timeout_s = 600.0;
    std::vector<Step> steps;
};

/// Throws E_SCENARIO on schema violations, decreasing at_s, or predicates on
/// topics the system never publishes.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

struct SessionReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string mode;
    bool task_completed = false;
    double elapsed_s = 0.0; ///< completion time, or total run time when not completed
    std::int64_t press_event_count = 0;
    std::int64_t pour_events = 0;
    std::string determinism_digest;
    std::string config_digest;
    bool timed_out = false;
    std::int64_t ticks = 0;
    std::size_t messages = 0;
    double box_content = 0.0;
    std::vector<double> container_fill;
    double max_conservation_error = 0.0; ///< over every scene/state message
    std::int64_t faults = 0;
    std::optional<std::string> failed_assertion;
    double failed_at_s = 0.0;
};

nlohmann::json to_json(const SessionReport& r);

enum class RunMode { Headless, Live };

struct RunOptions {
    RunMode mode = RunMode::Headless;
    std::optional<std::uint64_t> seed; ///< overrides the scenario seed
};

struct SessionResult {
    SessionReport report;
    bus::SessionLog log;
};

/// Runs the scenario against a fresh broker with every primary node attached.
/// Live mode uses the wall clock, paces ticks in real time and exposes the bus
/// on the configured ports. A failing assert stops the run and is recorded in
/// the report rather than thrown.
SessionResult run_scenario(const Scenario& scenario, const SystemConfig& cfg, const RunOptions& options = {});

} // namespace cobot::harness
