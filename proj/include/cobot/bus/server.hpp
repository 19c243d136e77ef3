#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "cobot/bus/broker.hpp"

namespace cobot::bus {

struct BindConfig {
    std::string host = "127.0.0.1";
    std::uint16_t tcp_port = 7450;
    std::uint16_t ws_port = 7451;
};

/// Network front-end for a Broker: newline-delimited JSON frames over TCP and
/// the same frames as WebSocket text messages. All socket I/O runs on one
/// internal thread, so deliveries to each connection are serialized.
///
/// Port 0 binds an ephemeral port; query the result with tcp_port()/ws_port().
class BusServer {
public:
    /// Binds both endpoints immediately; throws E_ENDPOINT_IN_USE on failure.
    BusServer(Broker& broker, BindConfig config);
    ~BusServer();

    BusServer(const BusServer&) = delete;
    BusServer& operator=(const BusServer&) = delete;

    void start();
    void stop();

    std::uint16_t tcp_port() const;
    std::uint16_t ws_port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cobot::bus
