#include "cobot/bus/broker.hpp"

#include <algorithm>

#include "cobot/error.hpp"

namespace cobot::bus {

namespace {

std::int64_t epoch_us() {
    using namespace std::chrono;
    return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

} // namespace

Broker::Broker() : Broker(Options{}) {}

Broker::Broker(Options options)
    : options_(std::move(options)),
      start_stamp_us_(options_.clock_mode == ClockMode::Wall ? epoch_us() : 0),
      wall_origin_(std::chrono::steady_clock::now()) {}

ClientId Broker::connect_local(LocalCallback callback) {
    std::lock_guard lock(mutex_);
    const ClientId id = next_client_++;
    clients_[id].local = std::move(callback);
    return id;
}

ClientId Broker::connect_remote(std::shared_ptr<RemoteSink> sink) {
    std::lock_guard lock(mutex_);
    const ClientId id = next_client_++;
    clients_[id].remote = std::move(sink);
    return id;
}

void Broker::disconnect(ClientId client) {
    std::lock_guard lock(mutex_);
    clients_.erase(client);
    std::erase_if(pending_, [client](const Pending& p) { return p.client == client; });
}

void Broker::subscribe(ClientId client, std::string_view pattern) {
    if (auto why = pattern_violation(pattern)) {
        throw Error("E_INVALID_TOPIC", "invalid subscription '" + std::string(pattern) + "': " + *why);
    }
    std::lock_guard lock(mutex_);
    auto it = clients_.find(client);
    if (it == clients_.end()) {
        throw Error("E_NOT_CONNECTED", "unknown client " + std::to_string(client));
    }
    auto& patterns = it->second.patterns;
    if (std::find(patterns.begin(), patterns.end(), pattern) == patterns.end()) {
        patterns.emplace_back(pattern);
    }
}

void Broker::unsubscribe(ClientId client, std::string_view pattern) {
    std::lock_guard lock(mutex_);
    if (auto it = clients_.find(client); it != clients_.end()) {
        std::erase(it->second.patterns, std::string(pattern));
    }
}

std::uint64_t Broker::publish(ClientId client, std::string_view topic, Json data) {
    if (auto why = topic_violation(topic)) {
        throw Error("E_INVALID_TOPIC", "invalid topic '" + std::string(topic) + "': " + *why);
    }
    std::unique_lock lock(mutex_);
    if (client != 0 && !clients_.contains(client)) {
        throw Error("E_NOT_CONNECTED", "unknown client " + std::to_string(client));
    }
    return publish_locked(lock, topic, std::move(data));
}

std::uint64_t Broker::publish_locked(std::unique_lock<std::mutex>& lock, std::string_view topic, Json data) {
    auto it = seqs_.find(topic);
    if (it == seqs_.end()) {
        it = seqs_.emplace(std::string(topic), 0).first;
    }
    const std::uint64_t seq = ++it->second;

    std::int64_t stamp = 0;
    if (options_.clock_mode == ClockMode::Virtual) {
        stamp = virtual_now_us_;
    } else {
        using namespace std::chrono;
        stamp = start_stamp_us_ +
                duration_cast<microseconds>(steady_clock::now() - wall_origin_).count();
    }
    auto msg = std::make_shared<const BusMessage>(BusMessage{std::string(topic), seq, stamp, std::move(data)});
    if (options_.record) {
        recorded_.push_back(*msg);
    }

    bool queued_local = false;
    for (const auto& [id, c] : clients_) {
        const bool match = std::any_of(c.patterns.begin(), c.patterns.end(),
                                       [&](const std::string& p) { return pattern_matches(p, topic); });
        if (!match) {
            continue;
        }
        if (c.remote) {
            c.remote->deliver(*msg);
        } else {
            pending_.push_back(Pending{id, msg});
            queued_local = true;
        }
    }
    lock.unlock();
    if (queued_local) {
        pending_cv_.notify_all();
    }
    return seq;
}

std::size_t Broker::pump() {
    std::lock_guard pump_lock(pump_mutex_);
    if (pumping_) {
        return 0;
    }
    pumping_ = true;
    std::size_t delivered = 0;
    for (;;) {
        LocalCallback callback;
        std::shared_ptr<const BusMessage> msg;
        {
            std::lock_guard lock(mutex_);
            if (pending_.empty()) {
                break;
            }
            auto next = std::move(pending_.front());
            pending_.pop_front();
            auto it = clients_.find(next.client);
            if (it == clients_.end()) {
                continue;
            }
            callback = it->second.local;
            msg = std::move(next.msg);
        }
        try {
            callback(*msg);
        } catch (...) {
            pumping_ = false;
            throw;
        }
        ++delivered;
    }
    pumping_ = false;
    return delivered;
}

bool Broker::wait_pending(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return pending_cv_.wait_for(lock, timeout, [this] { return !pending_.empty(); });
}

std::int64_t Broker::now_us() const {
    if (options_.clock_mode == ClockMode::Virtual) {
        std::lock_guard lock(mutex_);
        return virtual_now_us_;
    }
    using namespace std::chrono;
    return start_stamp_us_ + duration_cast<microseconds>(steady_clock::now() - wall_origin_).count();
}

void Broker::tick(std::int64_t dt_us) {
    if (options_.clock_mode != ClockMode::Virtual) {
        throw Error("E_CLOCK", "tick is only available under the virtual clock");
    }
    if (dt_us < 0) {
        throw Error("E_CLOCK", "tick dt_us must be non-negative");
    }
    std::unique_lock lock(mutex_);
    virtual_now_us_ += dt_us;
    publish_locked(lock, kTickTopic, Json{{"dt_us", dt_us}, {"now_us", virtual_now_us_}});
}

void Broker::advance_to(std::int64_t stamp_us) {
    if (options_.clock_mode != ClockMode::Virtual) {
        throw Error("E_CLOCK", "advance_to is only available under the virtual clock");
    }
    std::lock_guard lock(mutex_);
    if (stamp_us < virtual_now_us_) {
        throw Error("E_CLOCK", "virtual clock cannot move backwards");
    }
    virtual_now_us_ = stamp_us;
}

SessionLog Broker::log() const {
    std::lock_guard lock(mutex_);
    return SessionLog{LogHeader{options_.clock_mode, start_stamp_us_, options_.config_digest}, recorded_};
}

std::size_t Broker::message_count() const {
    std::lock_guard lock(mutex_);
    return recorded_.size();
}

std::uint64_t Broker::last_seq(std::string_view topic) const {
    std::lock_guard lock(mutex_);
    auto it = seqs_.find(topic);
    return it == seqs_.end() ? 0 : it->second;
}

} // namespace cobot::bus
