#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "pendlab/control_server.hpp"

namespace pendlab {

inline constexpr std::uint16_t kDefaultPort = 8700;

/// Port from PENDLAB_PORT when set and valid, else kDefaultPort.
std::uint16_t port_from_environment();

/// Socket front end for a ControlServer.
///
/// Each client connection carries newline-delimited JSON messages. A client
/// whose first bytes are an HTTP "GET " request is upgraded to WebSocket and
/// then exchanges one message per text frame, so browsers can connect too.
/// All socket work runs on a single I/O thread.
class TcpServer {
public:
    /// Binds immediately; throws std::system_error if the port is taken.
    TcpServer(ControlServer& server, std::uint16_t port, const std::string& address = "127.0.0.1");
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const;
    std::string address() const;

    /// Serves on the calling thread until stop().
    void run();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace pendlab
