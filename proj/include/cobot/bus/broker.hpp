#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cobot/bus/message.hpp"
#include "cobot/bus/session_log.hpp"

namespace cobot::bus {

using ClientId = std::uint64_t;

/// Receiver for messages delivered to a remote (network) client. deliver() runs
/// under the broker lock, in publish order, so it must only enqueue and must not
/// call back into the broker.
class RemoteSink {
public:
    virtual ~RemoteSink() = default;
    virtual void deliver(const BusMessage& msg) = 0;
};

using LocalCallback = std::function<void(const BusMessage&)>;

inline constexpr std::string_view kTickTopic = "clock/tick";

/// Topic-based publish/subscribe broker.
///
/// Local (in-process) clients receive messages through pump(), which drains a
/// single global queue in publish order; this gives deterministic, re-entrant
/// delivery (callbacks may publish). Remote clients are handed messages
/// immediately through their RemoteSink.
///
/// Under ClockMode::Virtual time only moves through tick()/advance_to().
class Broker {
public:
    struct Options {
        ClockMode clock_mode = ClockMode::Virtual;
        std::string config_digest;
        bool record = true;
    };

    Broker();
    explicit Broker(Options options);

    Broker(const Broker&) = delete;
    Broker& operator=(const Broker&) = delete;

    ClientId connect_local(LocalCallback callback);
    ClientId connect_remote(std::shared_ptr<RemoteSink> sink);
    void disconnect(ClientId client);

    /// Throws E_INVALID_TOPIC naming the violated rule.
    void subscribe(ClientId client, std::string_view pattern);
    void unsubscribe(ClientId client, std::string_view pattern);

    /// Stamps with broker time, assigns the next per-topic seq and fans out.
    /// Client 0 publishes on behalf of the broker owner without connecting.
    std::uint64_t publish(ClientId client, std::string_view topic, Json data);

    /// Delivers queued local messages until the queue is empty (including
    /// messages published by the callbacks themselves). Returns the count.
    std::size_t pump();

    /// Blocks until local messages are queued or the timeout expires.
    bool wait_pending(std::chrono::milliseconds timeout);

    std::int64_t now_us() const;
    ClockMode clock_mode() const noexcept { return options_.clock_mode; }

    /// Virtual clock only: advances by dt_us and publishes a "clock/tick"
    /// message {dt_us, now_us}.
    void tick(std::int64_t dt_us);

    /// Virtual clock only: moves time forward to `stamp_us` without publishing.
    void advance_to(std::int64_t stamp_us);

    SessionLog log() const;
    std::size_t message_count() const;
    std::uint64_t last_seq(std::string_view topic) const;

private:
    struct Client {
        LocalCallback local;
        std::shared_ptr<RemoteSink> remote;
        std::vector<std::string> patterns;
    };
    struct Pending {
        ClientId client;
        std::shared_ptr<const BusMessage> msg;
    };

    std::uint64_t publish_locked(std::unique_lock<std::mutex>& lock, std::string_view topic, Json data);

    Options options_;
    std::int64_t start_stamp_us_ = 0;
    std::chrono::steady_clock::time_point wall_origin_;

    mutable std::mutex mutex_;
    std::condition_variable pending_cv_;
    std::int64_t virtual_now_us_ = 0;
    ClientId next_client_ = 1;
    std::map<ClientId, Client> clients_;
    std::map<std::string, std::uint64_t, std::less<>> seqs_;
    std::deque<Pending> pending_;
    std::vector<BusMessage> recorded_;

    // One pump at a time; nested pump() from a callback is a no-op.
    std::recursive_mutex pump_mutex_;
    bool pumping_ = false;
};

} // namespace cobot::bus
