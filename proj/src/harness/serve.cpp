#include "cobot/harness/serve.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "cobot/analytics/tlx.hpp"
#include "cobot/bus/server.hpp"
#include "cobot/error.hpp"
#include "cobot/harness/nodes.hpp"
#include "cobot/harness/scenario.hpp"

namespace cobot::harness {

TlxRecorder::TlxRecorder(bus::Broker& broker, std::filesystem::path csv) : broker_(broker), csv_(std::move(csv)) {
    id_ = broker_.connect_local([this](const bus::BusMessage& msg) {
        try {
            const auto r = analytics::tlx_from_json(msg.data);
            analytics::validate(r);
            const bool fresh = !std::filesystem::exists(csv_) || std::filesystem::file_size(csv_) == 0;
            std::ofstream out(csv_, std::ios::app);
            if (!out) {
                throw Error("E_IO", "cannot append to " + csv_.string());
            }
            if (fresh) {
                out << analytics::tlx_csv_header(r.weights.has_value()) << '\n';
            }
            out << analytics::tlx_csv_row(r) << '\n';
            ++recorded_;
        } catch (const Error& e) {
            broker_.publish(id_, "study/tlx_error", {{"code", e.code()}, {"message", e.what()}});
        }
    });
    broker_.subscribe(id_, topics::kStudyTlx);
}

TlxRecorder::~TlxRecorder() {
    broker_.disconnect(id_);
}

void serve(const SystemConfig& cfg, const ServeOptions& options) {
    bus::Broker broker({bus::ClockMode::Wall, config_digest(cfg), options.log_path.has_value()});
    bus::BusServer server(broker, {cfg.ports.host, static_cast<std::uint16_t>(cfg.ports.tcp),
                                   static_cast<std::uint16_t>(cfg.ports.ws)});
    NodeSet nodes(broker, cfg);
    TlxRecorder recorder(broker, options.tlx_csv);

    httplib::Server http;
    std::thread http_thread;
    int http_port = 0;
    if (options.ui_dir) {
        if (!std::filesystem::is_directory(*options.ui_dir)) {
            throw Error("E_IO", "UI directory not found: " + options.ui_dir->string());
        }
        http.set_mount_point("/", options.ui_dir->string());
        http_port = cfg.ports.http == 0 ? http.bind_to_any_port(cfg.ports.host)
                                        : (http.bind_to_port(cfg.ports.host, cfg.ports.http) ? cfg.ports.http : -1);
        if (http_port < 0) {
            throw Error("E_ENDPOINT_IN_USE", "cannot bind HTTP port " + std::to_string(cfg.ports.http));
        }
        http_thread = std::thread([&http] { http.listen_after_bind(); });
    }

    server.start();
    if (options.on_ready) {
        options.on_ready(server.tcp_port(), server.ws_port(), http_port);
    }

    using clock = std::chrono::steady_clock;
    const auto origin = clock::now();
    std::int64_t elapsed_us = 0;
    auto next = origin + std::chrono::microseconds(kTickUs);
    while (!(options.stop && options.stop->load())) {
        if (options.duration_s && elapsed_us >= static_cast<std::int64_t>(*options.duration_s * 1e6)) {
            break;
        }
        // Deliver network traffic promptly between ticks.
        while (clock::now() < next) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(next - clock::now());
            if (broker.wait_pending(std::max(left, std::chrono::milliseconds(1)))) {
                broker.pump();
            }
        }
        elapsed_us += kTickUs;
        next += std::chrono::microseconds(kTickUs);
        broker.publish(0, bus::kTickTopic, {{"dt_us", kTickUs}, {"now_us", broker.now_us()}});
        broker.pump();
    }

    server.stop();
    if (http_thread.joinable()) {
        http.stop();
        http_thread.join();
    }
    broker.pump();
    if (options.log_path) {
        bus::write_log(*options.log_path, broker.log());
    }
}

} // namespace cobot::harness
