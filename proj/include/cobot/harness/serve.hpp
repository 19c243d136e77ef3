#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>

#include "cobot/bus/broker.hpp"
#include "cobot/harness/config.hpp"

namespace cobot::harness {

/// Appends every valid "study/tlx" payload to a CSV (header written when the
/// file is new). Invalid payloads are answered on "study/tlx_error".
class TlxRecorder {
public:
    TlxRecorder(bus::Broker& broker, std::filesystem::path csv);
    ~TlxRecorder();

    std::size_t recorded() const { return recorded_; }

private:
    bus::Broker& broker_;
    std::filesystem::path csv_;
    std::size_t recorded_ = 0;
    bus::ClientId id_;
};

struct ServeOptions {
    std::optional<std::filesystem::path> ui_dir; ///< static assets served over HTTP
    std::filesystem::path tlx_csv = "tlx_responses.csv";
    std::optional<std::filesystem::path> log_path; ///< session log written on shutdown
    std::optional<double> duration_s;            ///< run forever when empty
    const std::atomic<bool>* stop = nullptr;
    /// Called once the endpoints are bound, with the actual TCP and WebSocket ports.
    std::function<void(int tcp, int ws, int http)> on_ready;
};

/// Wall-clock broker with every primary node, the TCP/WebSocket bridge and a
/// 50 Hz tick, until `stop` is set or the duration elapses.
void serve(const SystemConfig& cfg, const ServeOptions& options);

} // namespace cobot::harness
