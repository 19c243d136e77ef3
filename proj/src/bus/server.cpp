#include "cobot/bus/server.hpp"

#include <deque>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "cobot/bus/protocol.hpp"
#include "cobot/error.hpp"

namespace cobot::bus {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxFrameBytes = 1 << 20;

/// Tracks live connections so stop() can detach them from the broker before
/// the io_context they post to is destroyed.
struct Registry {
    explicit Registry(Broker& b) : broker(b) {}

    Broker& broker;
    std::mutex mutex;
    std::set<ClientId> clients;

    ClientId add(std::shared_ptr<RemoteSink> sink) {
        const ClientId id = broker.connect_remote(std::move(sink));
        std::lock_guard lock(mutex);
        clients.insert(id);
        return id;
    }

    void remove(ClientId id) {
        broker.disconnect(id);
        std::lock_guard lock(mutex);
        clients.erase(id);
    }

    void clear() {
        std::lock_guard lock(mutex);
        for (auto id : clients) {
            broker.disconnect(id);
        }
        clients.clear();
    }
};

/// Outgoing-frame queue shared by both session kinds; `Derived::write_front()`
/// sends queue_.front() and calls on_written() when done.
template <class Derived>
class SessionBase : public RemoteSink, public std::enable_shared_from_this<Derived> {
public:
    SessionBase(asio::io_context& io, Registry& registry) : io_(io), registry_(registry) {}

    void deliver(const BusMessage& msg) override {
        auto text = delivery_frame(msg).dump();
        asio::dispatch(io_, [self = this->shared_from_this(), text = std::move(text)]() mutable {
            self->enqueue(std::move(text));
        });
    }

protected:
    void attach() { client_ = registry_.add(this->shared_from_this()); }

    void detach() {
        if (client_ != 0) {
            registry_.remove(client_);
            client_ = 0;
        }
        closed_ = true;
    }

    void handle_text(std::string_view text) {
        for (auto& reply : handle_frame(registry_.broker, client_, text)) {
            enqueue(reply.dump());
        }
    }

    void enqueue(std::string text) {
        if (closed_) {
            return;
        }
        queue_.push_back(std::move(text));
        if (queue_.size() == 1) {
            static_cast<Derived*>(this)->write_front();
        }
    }

    void on_written() {
        queue_.pop_front();
        if (!queue_.empty() && !closed_) {
            static_cast<Derived*>(this)->write_front();
        }
    }

    asio::io_context& io_;
    Registry& registry_;
    ClientId client_ = 0;
    std::deque<std::string> queue_;
    bool closed_ = false;
};

class TcpSession : public SessionBase<TcpSession> {
public:
    TcpSession(asio::io_context& io, Registry& registry, tcp::socket socket)
        : SessionBase(io, registry), socket_(std::move(socket)) {}

    void start() {
        attach();
        read_line();
    }

    void write_front() {
        queue_.front().push_back('\n');
        asio::async_write(socket_, asio::buffer(queue_.front()),
                          [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                              if (ec) {
                                  self->detach();
                                  return;
                              }
                              self->on_written();
                          });
    }

private:
    void read_line() {
        asio::async_read_until(socket_, asio::dynamic_buffer(buffer_, kMaxFrameBytes), '\n',
                               [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
                                   if (ec) {
                                       self->detach();
                                       return;
                                   }
                                   std::string line = self->buffer_.substr(0, n - 1);
                                   self->buffer_.erase(0, n);
                                   if (!line.empty() && line.back() == '\r') {
                                       line.pop_back();
                                   }
                                   if (!line.empty()) {
                                       self->handle_text(line);
                                   }
                                   self->read_line();
                               });
    }

    tcp::socket socket_;
    std::string buffer_;
};

class WsSession : public SessionBase<WsSession> {
public:
    WsSession(asio::io_context& io, Registry& registry, tcp::socket socket)
        : SessionBase(io, registry), ws_(std::move(socket)) {}

    void start() {
        ws_.read_message_max(kMaxFrameBytes);
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) {
                return;
            }
            self->attach();
            self->read_message();
        });
    }

    void write_front() {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) {
                            if (ec) {
                                self->detach();
                                return;
                            }
                            self->on_written();
                        });
    }

private:
    void read_message() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->detach();
                return;
            }
            const auto text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->handle_text(text);
            self->read_message();
        });
    }

    websocket::stream<tcp::socket> ws_;
    beast::flat_buffer buffer_;
};

tcp::acceptor bind_acceptor(asio::io_context& io, const std::string& host, std::uint16_t port,
                            const char* what) {
    tcp::acceptor acceptor(io);
    boost::system::error_code ec;
    const tcp::endpoint endpoint(asio::ip::make_address(host, ec), port);
    if (ec) {
        throw Error("E_CONFIG", std::string("bad bind address '") + host + "': " + ec.message());
    }
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) {
        acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    }
    if (!ec) {
        acceptor.bind(endpoint, ec);
    }
    if (!ec) {
        acceptor.listen(asio::socket_base::max_listen_connections, ec);
    }
    if (ec) {
        throw Error("E_ENDPOINT_IN_USE", std::string(what) + " endpoint " + host + ":" + std::to_string(port) +
                                             " unavailable: " + ec.message());
    }
    return acceptor;
}

} // namespace

struct BusServer::Impl {
    Impl(Broker& b, const BindConfig& cfg)
        : registry(b),
          tcp_acceptor(bind_acceptor(io, cfg.host, cfg.tcp_port, "tcp")),
          ws_acceptor(bind_acceptor(io, cfg.host, cfg.ws_port, "websocket")) {}

    template <class Session>
    void accept(tcp::acceptor& acceptor) {
        acceptor.async_accept([this, &acceptor](boost::system::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            std::make_shared<Session>(io, registry, std::move(socket))->start();
            accept<Session>(acceptor);
        });
    }

    asio::io_context io;
    Registry registry;
    tcp::acceptor tcp_acceptor;
    tcp::acceptor ws_acceptor;
    std::thread thread;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
};

BusServer::BusServer(Broker& broker, BindConfig config) : impl_(std::make_unique<Impl>(broker, config)) {}

BusServer::~BusServer() { stop(); }

void BusServer::start() {
    if (impl_->thread.joinable()) {
        return;
    }
    impl_->work.emplace(impl_->io.get_executor());
    impl_->accept<TcpSession>(impl_->tcp_acceptor);
    impl_->accept<WsSession>(impl_->ws_acceptor);
    impl_->thread = std::thread([this] { impl_->io.run(); });
}

void BusServer::stop() {
    if (!impl_ || !impl_->thread.joinable()) {
        return;
    }
    asio::post(impl_->io, [this] {
        boost::system::error_code ec;
        impl_->tcp_acceptor.close(ec);
        impl_->ws_acceptor.close(ec);
    });
    impl_->work.reset();
    impl_->io.stop();
    impl_->thread.join();
    impl_->registry.clear();
}

std::uint16_t BusServer::tcp_port() const { return impl_->tcp_acceptor.local_endpoint().port(); }
std::uint16_t BusServer::ws_port() const { return impl_->ws_acceptor.local_endpoint().port(); }

} // namespace cobot::bus
