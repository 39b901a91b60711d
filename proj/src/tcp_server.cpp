#include "pendlab/tcp_server.hpp"

#include <cstdlib>
#include <deque>
#include <optional>
#include <system_error>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace pendlab {

namespace asio = boost::asio;
namespace beast = boost::beast;
using tcp = asio::ip::tcp;

std::uint16_t port_from_environment() {
    if (const char* text = std::getenv("PENDLAB_PORT")) {
        char* end = nullptr;
        const long value = std::strtol(text, &end, 10);
        if (end != text && *end == '\0' && value >= 0 && value <= 65535) return static_cast<std::uint16_t>(value);
    }
    return kDefaultPort;
}

namespace {

constexpr std::size_t kMaxLine = 64 * 1024;

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, ControlServer& server) : socket_(std::move(socket)), server_(server) {}
    ~Connection() {
        if (subscription_) subscription_->close();
    }

    void start() {
        subscription_ = server_.subscribe();
        std::weak_ptr<Connection> weak = shared_from_this();
        auto executor = socket_.get_executor();
        subscription_->set_notify([weak, executor] {
            asio::post(executor, [weak] {
                if (auto self = weak.lock()) self->pump();
            });
        });
        // A client that only listens never sends the bytes that tell us its
        // framing; after a short wait it is treated as newline-delimited.
        detect_timer_.expires_after(std::chrono::milliseconds(200));
        auto self = shared_from_this();
        detect_timer_.async_wait([self](beast::error_code ec) {
            if (ec || self->mode_ != Mode::Detecting) return;
            self->mode_ = Mode::Lines;
            self->pump();
        });
        read_first();
    }

private:
    void read_first() {
        auto self = shared_from_this();
        socket_.async_read_some(buffer_.prepare(1024), [self](beast::error_code ec, std::size_t n) {
            if (ec) return self->close();
            self->buffer_.commit(n);
            const std::string_view head(static_cast<const char*>(self->buffer_.data().data()), self->buffer_.size());
            if (head.size() < 4 && std::string_view("GET ").starts_with(head)) return self->read_first();
            self->detect_timer_.cancel();
            if (head.starts_with("GET ")) return self->upgrade();
            self->mode_ = Mode::Lines;
            self->pump();
            self->consume_lines();
        });
    }

    // Newline-delimited mode.
    void consume_lines() {
        for (;;) {
            const std::string_view data(static_cast<const char*>(buffer_.data().data()), buffer_.size());
            const auto newline = data.find('\n');
            if (newline == std::string_view::npos) break;
            std::string line(data.substr(0, newline));
            buffer_.consume(newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) reply(server_.handle_line(line));
        }
        if (buffer_.size() > kMaxLine) {
            buffer_.consume(buffer_.size());
            reply(encode(ServerEvent{ErrorEvent{"bad-request", "line too long", ""}}));
        }
        auto self = shared_from_this();
        socket_.async_read_some(buffer_.prepare(4096), [self](beast::error_code ec, std::size_t n) {
            if (ec) return self->close();
            self->buffer_.commit(n);
            self->consume_lines();
        });
    }

    void upgrade() {
        mode_ = Mode::Upgrading;
        auto self = shared_from_this();
        beast::http::async_read(socket_, buffer_, request_, [self](beast::error_code ec, std::size_t) {
            if (ec || !beast::websocket::is_upgrade(self->request_)) return self->close();
            self->detect_timer_.cancel();
            self->ws_.emplace(std::move(self->socket_));
            self->ws_->text(true);
            self->ws_->async_accept(self->request_, [self](beast::error_code ec2) {
                if (ec2) return self->close();
                self->buffer_.consume(self->buffer_.size());
                self->mode_ = Mode::WebSocket;
                self->read_ws();
                self->pump();
            });
        });
    }

    void read_ws() {
        auto self = shared_from_this();
        ws_->async_read(buffer_, [self](beast::error_code ec, std::size_t) {
            if (ec) return self->close();
            std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
            self->reply(self->server_.handle_line(text));
            self->read_ws();
        });
    }

    void reply(std::string message) {
        replies_.push_back(std::move(message));
        pump();
    }

    void pump() {
        if (writing_ || closed_) return;
        if (mode_ == Mode::Detecting || mode_ == Mode::Upgrading) return;
        std::optional<std::string> next;
        if (!replies_.empty()) {
            next = std::move(replies_.front());
            replies_.pop_front();
        } else if (auto event = subscription_->try_pop()) {
            next = encode(*event);
        }
        if (!next) return;
        writing_ = true;
        outgoing_ = std::move(*next);
        auto self = shared_from_this();
        auto done = [self](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) return self->close();
            self->pump();
        };
        if (ws_) {
            ws_->async_write(asio::buffer(outgoing_), done);
        } else {
            outgoing_.push_back('\n');
            asio::async_write(socket_, asio::buffer(outgoing_), done);
        }
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        if (subscription_) subscription_->close();
        beast::error_code ignored;
        if (ws_) beast::get_lowest_layer(*ws_).close(ignored);
        else socket_.close(ignored);
    }

    tcp::socket socket_;
    std::optional<beast::websocket::stream<tcp::socket>> ws_;
    ControlServer& server_;
    std::shared_ptr<Subscription> subscription_;
    beast::flat_buffer buffer_;
    beast::http::request<beast::http::string_body> request_;
    std::deque<std::string> replies_;
    std::string outgoing_;
    bool writing_ = false;
    enum class Mode { Detecting, Lines, Upgrading, WebSocket };
    Mode mode_ = Mode::Detecting;
    asio::steady_timer detect_timer_{socket_.get_executor()};
    bool closed_ = false;
};

}  // namespace

struct TcpServer::Impl {
    Impl(ControlServer& s, std::uint16_t port, const std::string& address)
        : server(s), acceptor(io) {
        tcp::endpoint endpoint(asio::ip::make_address(address), port);
        acceptor.open(endpoint.protocol());
        acceptor.set_option(tcp::acceptor::reuse_address(true));
        acceptor.bind(endpoint);
        acceptor.listen();
    }

    void accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec == asio::error::operation_aborted) return;
            if (!ec) {
                socket.set_option(tcp::no_delay(true));
                std::make_shared<Connection>(std::move(socket), server)->start();
            }
            accept();
        });
    }

    ControlServer& server;
    asio::io_context io;
    tcp::acceptor acceptor;
};

TcpServer::TcpServer(ControlServer& server, std::uint16_t port, const std::string& address)
{
    try {
        impl_ = std::make_unique<Impl>(server, port, address);
    } catch (const boost::system::system_error& e) {
        throw std::system_error(e.code().value(), std::system_category(), e.what());
    }
    impl_->accept();
}

TcpServer::~TcpServer() { stop(); }

std::uint16_t TcpServer::port() const { return impl_->acceptor.local_endpoint().port(); }

std::string TcpServer::address() const { return impl_->acceptor.local_endpoint().address().to_string(); }

void TcpServer::run() { impl_->io.run(); }

void TcpServer::start() {
    thread_ = std::thread([this] { run(); });
}

void TcpServer::stop() {
    asio::post(impl_->io, [this] {
        beast::error_code ignored;
        impl_->acceptor.close(ignored);
    });
    impl_->io.stop();
    if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

}  // namespace pendlab
