/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

// WebSocket front end for ui::Session. Everything runs on one io_context thread, so the session
// needs no locking: client frames are handled between ticks and ticks are driven by a timer.

#include "hrcsim/ui_protocol.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <thread>

namespace hrcsim::ui {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

inline const std::string kSessionPath = "/session";

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8765;
    /// Simulated seconds per wall second; 0 runs ticks back to back.
    double realtime_factor = 1.0;
    int snapshot_every = 2;
};

class Server {
  public:
    Server(Scenario scenario, SimConfig config, ServerOptions options)
        : options_(std::move(options)), session_(std::move(scenario), config, options_.snapshot_every),
          dt_(config.dt), acceptor_(ioc_), timer_(ioc_) {
        const tcp::endpoint ep{net::ip::make_address(options_.address), options_.port};
        acceptor_.open(ep.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        session_.disconnect(); // nothing runs until a browser attaches
    }

    ~Server() { stop(); }

    /// The bound port (useful when constructed with port 0).
    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    /// Serves until stop(). Blocks the calling thread.
    void run() {
        do_accept();
        schedule_tick();
        ioc_.run();
    }

    void start_background() {
        thread_ = std::thread([this] { run(); });
    }

    void stop() {
        net::post(ioc_, [this] {
            beast::error_code ec;
            acceptor_.close(ec);
            timer_.cancel();
            if (conn_) beast::get_lowest_layer(conn_->ws).close();
            ioc_.stop();
        });
        if (thread_.joinable()) thread_.join();
    }

  private:
    struct Connection {
        explicit Connection(tcp::socket s) : ws(std::move(s)) {}
        websocket::stream<tcp::socket> ws;
        beast::flat_buffer buffer;
        std::deque<std::string> outbox;
        bool writing = false;
    };

    void do_accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return; // acceptor closed
            handshake(std::make_shared<tcp::socket>(std::move(socket)));
            do_accept();
        });
    }

    void handshake(std::shared_ptr<tcp::socket> socket) {
        auto buffer = std::make_shared<beast::flat_buffer>();
        auto req = std::make_shared<http::request<http::string_body>>();
        http::async_read(*socket, *buffer, *req, [this, socket, buffer, req](beast::error_code ec, std::size_t) {
            if (ec) return;
            auto refuse = [socket](http::status status, std::string body) {
                auto res = std::make_shared<http::response<http::string_body>>(status, 11);
                res->set(http::field::content_type, "text/plain");
                res->body() = std::move(body);
                res->prepare_payload();
                http::async_write(*socket, *res, [socket, res](beast::error_code, std::size_t) {
                    beast::error_code ignored;
                    socket->shutdown(tcp::socket::shutdown_both, ignored);
                });
            };
            if (req->target() != kSessionPath || !websocket::is_upgrade(*req)) {
                refuse(http::status::not_found, "websocket endpoint is " + kSessionPath + "\n");
                return;
            }
            if (conn_) {
                refuse(http::status::conflict, "a session is already attached\n");
                return;
            }
            auto conn = std::make_shared<Connection>(std::move(*socket));
            conn->ws.text(true);
            conn_ = conn;
            conn->ws.async_accept(*req, [this, conn](beast::error_code ec) {
                if (ec) {
                    drop(conn);
                    return;
                }
                session_.resume();
                send(session_.snapshot());
                do_read(conn);
            });
        });
    }

    void do_read(const std::shared_ptr<Connection>& conn) {
        conn->ws.async_read(conn->buffer, [this, conn](beast::error_code ec, std::size_t) {
            if (ec) {
                drop(conn);
                return;
            }
            const std::string text = beast::buffers_to_string(conn->buffer.data());
            conn->buffer.consume(conn->buffer.size());
            try {
                for (ServerMsg& m : session_.on_message(decode_client(text))) send(m);
            } catch (const DecodeError& e) {
                send(ErrorMsg{"bad_message", e.what()});
            }
            do_read(conn);
        });
    }

    void drop(const std::shared_ptr<Connection>& conn) {
        if (conn_ == conn) {
            conn_.reset();
            session_.disconnect();
        }
    }

    void send(const ServerMsg& msg) {
        if (!conn_) return;
        conn_->outbox.push_back(encode(msg));
        if (!conn_->writing) do_write(conn_);
    }

    void do_write(const std::shared_ptr<Connection>& conn) {
        conn->writing = true;
        conn->ws.async_write(net::buffer(conn->outbox.front()), [this, conn](beast::error_code ec, std::size_t) {
            conn->outbox.pop_front();
            if (ec) {
                conn->writing = false;
                drop(conn);
                return;
            }
            if (conn->outbox.empty()) {
                conn->writing = false;
            } else {
                do_write(conn);
            }
        });
    }

    void schedule_tick() {
        const auto period = options_.realtime_factor > 0.0
                                ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(dt_ / options_.realtime_factor))
                                : std::chrono::steady_clock::duration::zero();
        next_tick_ = next_tick_ == std::chrono::steady_clock::time_point{} ? std::chrono::steady_clock::now() + period
                                                                           : next_tick_ + period;
        if (next_tick_ < std::chrono::steady_clock::now() - std::chrono::seconds(1)) {
            next_tick_ = std::chrono::steady_clock::now(); // fell far behind; do not try to catch up
        }
        timer_.expires_at(next_tick_);
        timer_.async_wait([this](beast::error_code ec) {
            if (ec) return;
            for (ServerMsg& m : session_.tick()) send(m);
            schedule_tick();
        });
    }

    ServerOptions options_;
    Session session_;
    double dt_;
    net::io_context ioc_;
    tcp::acceptor acceptor_;
    net::steady_timer timer_;
    std::chrono::steady_clock::time_point next_tick_{};
    std::shared_ptr<Connection> conn_;
    std::thread thread_;
};

} // namespace hrcsim::ui
