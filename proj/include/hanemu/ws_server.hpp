#pragma once

// WebSocket transport for live mode. Serves one dashboard session: after
// the handshake it sends the panel snapshot, then advances the simulation
// once per tick and sends each outbound protocol line as one text frame.
// Inbound frames may carry any number of '\n'-terminated UIE lines.
// The socket is closed when the day is over.

#include <chrono>
#include <deque>
#include <memory>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "hanemu/live.hpp"
#include "hanemu/protocol.hpp"

namespace hanemu::live {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class WsLiveServer {
 public:
  WsLiveServer(net::io_context& ioc, const tcp::endpoint& endpoint, LiveSession& session,
               std::chrono::milliseconds tick)
      : acceptor_(ioc, endpoint), session_(session), tick_(tick), timer_(ioc) {}

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  // Non-empty when the session ended on a transport error.
  const std::string& error() const noexcept { return error_; }

  void start() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return fail("accept", ec);
      ws_ = std::make_unique<websocket::stream<tcp::socket>>(std::move(socket));
      ws_->text(true);
      ws_->async_accept([this](beast::error_code ec2) {
        if (ec2) return fail("handshake", ec2);
        for (auto& line : session_.snapshot()) enqueue(std::move(line));
        read_loop();
        schedule_tick();
      });
    });
  }

 private:
  void fail(const char* what, beast::error_code ec) {
    if (error_.empty() && ec != websocket::error::closed && ec != net::error::operation_aborted)
      error_ = std::string(what) + ": " + ec.message();
    stop();
  }

  void stop() {
    stopped_ = true;
    timer_.cancel();
    beast::error_code ignored;
    acceptor_.close(ignored);
    if (ws_) beast::get_lowest_layer(*ws_).close(ignored);
  }

  void read_loop() {
    ws_->async_read(in_buffer_, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        if (!closing_) fail("read", ec);
        return;
      }
      framer_.feed(beast::buffers_to_string(in_buffer_.data()));
      in_buffer_.consume(in_buffer_.size());
      while (auto line = framer_.next_line()) session_.submit_line(*line);
      read_loop();
    });
  }

  void schedule_tick() {
    timer_.expires_after(tick_);
    timer_.async_wait([this](beast::error_code ec) {
      if (ec || stopped_) return;
      for (auto& line : session_.advance()) enqueue(std::move(line));
      if (session_.done()) {
        finishing_ = true;
        maybe_close();
        return;
      }
      schedule_tick();
    });
  }

  void enqueue(std::string line) {
    out_.push_back(std::move(line));
    if (!writing_) write_next();
  }

  void write_next() {
    if (out_.empty()) {
      writing_ = false;
      maybe_close();
      return;
    }
    writing_ = true;
    ws_->async_write(net::buffer(out_.front()), [this](beast::error_code ec, std::size_t) {
      if (ec) return fail("write", ec);
      out_.pop_front();
      write_next();
    });
  }

  void maybe_close() {
    if (!finishing_ || writing_ || closing_ || stopped_) return;
    closing_ = true;
    ws_->async_close(websocket::close_code::normal, [this](beast::error_code ec) {
      if (ec) return fail("close", ec);
      stop();
    });
  }

  tcp::acceptor acceptor_;
  LiveSession& session_;
  std::chrono::milliseconds tick_;
  net::steady_timer timer_;
  std::unique_ptr<websocket::stream<tcp::socket>> ws_;
  beast::flat_buffer in_buffer_;
  protocol::LineFramer framer_;
  std::deque<std::string> out_;
  std::string error_;
  bool writing_ = false;
  bool finishing_ = false;
  bool closing_ = false;
  bool stopped_ = false;
};

}  // namespace hanemu::live
