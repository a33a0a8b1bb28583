// Copyright 2026 The Aerovis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aerovis/gateway/gateway.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stop_token>
#include <thread>

namespace aerovis::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

// ---------------------------------------------------------------------------
// ClientBackend

ClientBackend::ClientBackend(client::DroneClient& client, control::VisionLoop* vision)
    : client_(client), vision_(vision) {}

void ClientBackend::execute(const CommandRequest& r) {
  if (r.name == "takeoff") client_.takeoff();
  else if (r.name == "land") client_.land();
  else if (r.name == "hover") client_.hover();
  else if (r.name == "emergency") client_.emergency();
  else if (r.name == "reset") client_.reset_emergency();
  else if (r.name == "trim") client_.flat_trim();
  else if (r.name == "move") client_.move(r.direction, r.speed);
  else if (r.name == "track") {
    if (!vision_) throw std::invalid_argument("tracking is not available");
    if (r.enabled && !client_.connected()) throw StateError(client_.state(), "track requires a connection");
    vision_->set_tracking(r.enabled);
  } else {
    throw std::invalid_argument("unknown command '" + r.name + "'");
  }
}

TelemetryView ClientBackend::telemetry() {
  TelemetryView v;
  v.state = client_.state();
  if (client_.connected()) {
    try {
      v.snapshot = client_.telemetry_snapshot();
    } catch (const StateError&) {
      // Disconnected between the two reads.
    }
  }
  if (vision_) {
    const auto last = vision_->last();
    v.action = last.action;
    v.box = last.box;
    v.tracking = vision_->tracking();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Server

namespace {

const char* kFallbackIndex =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>aerovis</title></head>"
    "<body><h1>aerovis gateway</h1><p>No UI bundle configured. Start with "
    "<code>aerovis gui --ui-dir DIR</code>. The operator socket is at <code>/ws</code>.</p>"
    "</body></html>";

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Maps a request target onto ui_dir, refusing anything that escapes it.
std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string_view target) {
  std::string path(target.substr(0, target.find('?')));
  if (path.empty() || path.front() != '/') return std::nullopt;
  if (path.back() == '/') path += "index.html";
  const std::filesystem::path rel = std::filesystem::path(path.substr(1)).lexically_normal();
  for (const auto& part : rel) {
    if (part == "..") return std::nullopt;
  }
  if (rel.is_absolute()) return std::nullopt;
  return root / rel;
}

struct Job {
  std::function<void()> run;
};

}  // namespace

class WsSession;

struct Gateway::Impl {
  Impl(GatewayBackend& b, GatewayConfig c) : backend(b), config(std::move(c)) {}

  GatewayBackend& backend;
  GatewayConfig config;

  asio::io_context io;
  std::optional<tcp::acceptor> acceptor;
  std::thread io_thread;
  std::uint16_t bound_port = 0;
  bool started = false;

  // Only touched on the io thread.
  std::weak_ptr<WsSession> operator_session;

  // Newest frame not yet handed to the io thread.
  std::mutex frame_mu;
  std::shared_ptr<const Bytes> latest_frame;
  std::atomic<bool> frame_post_pending{false};
  std::atomic<std::uint32_t> frame_seq{0};

  // Command executor with an emergency lane.
  std::mutex exec_mu;
  std::condition_variable exec_cv;
  std::deque<Job> urgent;
  std::deque<Job> normal;
  bool exec_stop = false;
  std::thread exec_thread;

  // Sampled off the io thread so a busy backend cannot stall the sockets.
  std::jthread telemetry_thread;

  std::atomic<std::uint64_t> frames_published{0};
  std::atomic<std::uint64_t> frames_sent{0};
  std::atomic<std::uint64_t> frames_dropped{0};
  std::atomic<std::uint64_t> telemetry_sent{0};
  std::atomic<std::uint64_t> commands{0};

  void do_accept();
  void on_text(const std::shared_ptr<WsSession>& session, const std::string& text);
  void submit(bool emergency, std::function<void()> fn);
  void executor_loop();
  void deliver_frame();
  void telemetry_loop(std::stop_token stop);
  http::response<http::string_body> handle_http(const http::request<http::string_body>& req);
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Gateway::Impl& gw)
      : ws_(std::move(socket)), gw_(gw), timer_(ws_.get_executor()) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(1 << 20);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void send_text(std::string text) {
    texts_.push_back(std::make_shared<const std::string>(std::move(text)));
    pump();
  }

  void push_telemetry(std::shared_ptr<const std::string> text) {
    if (!accepted_) return;
    if (telemetry_.size() >= kTelemetryBacklog) telemetry_.pop_front();
    telemetry_.push_back(std::move(text));
    pump();
  }

  void set_frame(std::shared_ptr<const Bytes> frame) {
    if (frame_) gw_.frames_dropped.fetch_add(1);
    frame_ = std::move(frame);
    pump();
  }

  bool open() const noexcept { return !closed_; }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::debug("gateway: websocket handshake failed: {}", ec.message());
      return;
    }
    auto current = gw_.operator_session.lock();
    if (current && current->open()) {
      spdlog::info("gateway: rejecting second operator");
      send_text(error_envelope("null", "occupied"));
      close_after_flush_ = true;
      return;
    }
    gw_.operator_session = shared_from_this();
    accepted_ = true;
    spdlog::info("gateway: operator connected");
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      if (ec != websocket::error::closed) spdlog::debug("gateway: operator read ended: {}", ec.message());
      shut();
      return;
    }
    if (!ws_.got_text()) {
      buffer_.consume(buffer_.size());
      send_text(error_envelope("null", "binary messages are not accepted"));
    } else {
      std::string text = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      gw_.on_text(shared_from_this(), text);
    }
    do_read();
  }

  void pump() {
    if (writing_ || closed_) return;
    std::shared_ptr<const std::string> text;
    std::shared_ptr<const Bytes> binary;
    if (!texts_.empty()) {
      text = std::move(texts_.front());
      texts_.pop_front();
    } else if (!telemetry_.empty()) {
      text = std::move(telemetry_.front());
      telemetry_.pop_front();
      gw_.telemetry_sent.fetch_add(1);
    } else if (frame_) {
      const auto now = std::chrono::steady_clock::now();
      if (now < next_frame_at_) {
        arm_frame_timer();
        return;
      }
      next_frame_at_ = now + gw_.config.min_frame_interval;
      binary = std::move(frame_);
      frame_.reset();
    } else {
      if (close_after_flush_) {
        closed_ = true;
        ws_.async_close(websocket::close_code::try_again_later,
                        [self = shared_from_this()](beast::error_code) {});
      }
      return;
    }
    writing_ = true;
    auto done = [self = shared_from_this(), text, binary](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) {
        spdlog::debug("gateway: write failed: {}", ec.message());
        self->shut();
        return;
      }
      if (binary) self->gw_.frames_sent.fetch_add(1);
      self->pump();
    };
    if (text) {
      ws_.text(true);
      ws_.async_write(asio::buffer(*text), std::move(done));
    } else {
      ws_.binary(true);
      ws_.async_write(asio::buffer(*binary), std::move(done));
    }
  }

  void arm_frame_timer() {
    if (timer_armed_) return;
    timer_armed_ = true;
    timer_.expires_at(next_frame_at_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      self->timer_armed_ = false;
      if (!ec) self->pump();
    });
  }

  void shut() {
    if (shut_) return;
    shut_ = true;
    closed_ = true;
    timer_.cancel();
    if (gw_.operator_session.lock().get() == this) {
      gw_.operator_session.reset();
      spdlog::info("gateway: operator disconnected");
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  Gateway::Impl& gw_;
  asio::steady_timer timer_;
  std::chrono::steady_clock::time_point next_frame_at_{};
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> texts_;
  std::deque<std::shared_ptr<const std::string>> telemetry_;
  std::shared_ptr<const Bytes> frame_;
  static constexpr std::size_t kTelemetryBacklog = 8;
  bool accepted_ = false;
  bool timer_armed_ = false;
  bool writing_ = false;
  bool closed_ = false;
  bool close_after_flush_ = false;
  bool shut_ = false;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Gateway::Impl& gw) : stream_(std::move(socket)), gw_(gw) {}

  void run() { do_read(); }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(1 << 16);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec == http::error::end_of_stream) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ec) return;
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (req.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), gw_)->run(std::move(req));
        return;
      }
    }
    auto res = std::make_shared<http::response<http::string_body>>(gw_.handle_http(req));
    const bool keep_alive = res->keep_alive();
    http::async_write(stream_, *res, [self = shared_from_this(), res, keep_alive](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!keep_alive) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  Gateway::Impl& gw_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

http::response<http::string_body> Gateway::Impl::handle_http(const http::request<http::string_body>& req) {
  http::response<http::string_body> res;
  res.version(req.version());
  res.keep_alive(req.keep_alive());
  res.set(http::field::server, "aerovis");

  auto reply = [&](http::status status, std::string body, std::string_view type) {
    res.result(status);
    res.set(http::field::content_type, std::string(type));
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };

  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return reply(http::status::method_not_allowed, "method not allowed\n", "text/plain");
  }
  const std::string_view target(req.target().data(), req.target().size());
  if (target == "/healthz") return reply(http::status::ok, "ok", "text/plain");
  if (target == "/ws") return reply(http::status::upgrade_required, "websocket upgrade required\n", "text/plain");

  if (config.ui_dir) {
    if (const auto path = resolve_static(*config.ui_dir, target)) {
      if (auto body = read_file(*path)) return reply(http::status::ok, std::move(*body), mime_type(*path));
    }
  } else if (target == "/" || target == "/index.html") {
    return reply(http::status::ok, kFallbackIndex, "text/html");
  }
  return reply(http::status::not_found, "not found\n", "text/plain");
}

void Gateway::Impl::do_accept() {
  acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec != asio::error::operation_aborted) spdlog::warn("gateway: accept failed: {}", ec.message());
      if (!acceptor->is_open()) return;
    } else {
      std::make_shared<HttpSession>(std::move(socket), *this)->run();
    }
    do_accept();
  });
}

void Gateway::Impl::on_text(const std::shared_ptr<WsSession>& session, const std::string& text) {
  auto parsed = parse_ws_message(text);
  if (auto* err = std::get_if<std::string>(&parsed)) {
    session->send_text(*err);
    return;
  }
  auto request = std::get<CommandRequest>(std::move(parsed));
  commands.fetch_add(1);
  std::weak_ptr<WsSession> weak = session;
  const bool emergency = request.is_emergency();
  submit(emergency, [this, weak, request = std::move(request)] {
    std::string reply = execute_request(request, backend);
    std::optional<std::string> follow_up;
    if (request.name == "track" && reply.find("\"ack\"") != std::string::npos) {
      const auto view = backend.telemetry();
      follow_up = track_envelope(view.tracking, view.action);
    }
    asio::post(io, [weak, reply = std::move(reply), follow_up = std::move(follow_up)]() mutable {
      if (auto s = weak.lock()) {
        s->send_text(std::move(reply));
        if (follow_up) s->send_text(std::move(*follow_up));
      }
    });
  });
}

void Gateway::Impl::submit(bool emergency, std::function<void()> fn) {
  {
    std::lock_guard lock(exec_mu);
    (emergency ? urgent : normal).push_back(Job{std::move(fn)});
  }
  exec_cv.notify_one();
}

void Gateway::Impl::executor_loop() {
  for (;;) {
    Job job;
    {
      std::unique_lock lock(exec_mu);
      exec_cv.wait(lock, [&] { return exec_stop || !urgent.empty() || !normal.empty(); });
      if (exec_stop) return;
      auto& lane = urgent.empty() ? normal : urgent;
      job = std::move(lane.front());
      lane.pop_front();
    }
    try {
      job.run();
    } catch (const std::exception& e) {
      spdlog::error("gateway: command job failed: {}", e.what());
    }
  }
}

void Gateway::Impl::deliver_frame() {
  frame_post_pending.store(false);
  std::shared_ptr<const Bytes> frame;
  {
    std::lock_guard lock(frame_mu);
    frame = std::move(latest_frame);
    latest_frame.reset();
  }
  if (!frame) return;
  auto session = operator_session.lock();
  if (session && session->open()) session->set_frame(std::move(frame));
}

void Gateway::Impl::telemetry_loop(std::stop_token stop) {
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config.telemetry_hz));
  std::mutex mu;
  std::condition_variable_any cv;
  auto next = std::chrono::steady_clock::now();
  while (!stop.stop_requested()) {
    next += period;
    {
      std::unique_lock lock(mu);
      if (cv.wait_until(lock, stop, next, [] { return false; })) return;
    }
    if (stop.stop_requested()) return;
    std::shared_ptr<const std::string> text;
    try {
      text = std::make_shared<const std::string>(telemetry_envelope(backend.telemetry()));
    } catch (const std::exception& e) {
      spdlog::warn("gateway: telemetry sample failed: {}", e.what());
      continue;
    }
    asio::post(io, [this, text = std::move(text)]() mutable {
      auto session = operator_session.lock();
      if (session && session->open()) session->push_telemetry(std::move(text));
    });
  }
}

Gateway::Gateway(GatewayBackend& backend, GatewayConfig config)
    : impl_(std::make_unique<Impl>(backend, std::move(config))) {
  if (!(impl_->config.telemetry_hz > 0)) throw std::invalid_argument("telemetry rate must be positive");
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  auto& g = *impl_;
  if (g.started) return;
  try {
    const auto address = asio::ip::make_address(g.config.host);
    g.acceptor.emplace(g.io);
    tcp::endpoint ep(address, g.config.port);
    g.acceptor->open(ep.protocol());
    g.acceptor->set_option(asio::socket_base::reuse_address(true));
    g.acceptor->bind(ep);
    g.acceptor->listen(asio::socket_base::max_listen_connections);
    g.bound_port = g.acceptor->local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    g.acceptor.reset();
    throw GatewayStartupError("gateway bind " + g.config.host + ":" + std::to_string(g.config.port) + ": " +
                              e.what());
  }
  g.started = true;
  g.do_accept();
  g.exec_thread = std::thread([&g] { g.executor_loop(); });
  g.telemetry_thread = std::jthread([&g](std::stop_token st) { g.telemetry_loop(std::move(st)); });
  g.io_thread = std::thread([&g] {
    try {
      g.io.run();
    } catch (const std::exception& e) {
      spdlog::error("gateway: io loop stopped: {}", e.what());
    }
  });
  spdlog::info("gateway: serving http://{}:{}/", g.config.host, g.bound_port);
}

void Gateway::stop() {
  auto& g = *impl_;
  if (!g.started) return;
  g.started = false;
  if (g.telemetry_thread.joinable()) {
    g.telemetry_thread.request_stop();
    g.telemetry_thread.join();
  }
  asio::post(g.io, [&g] {
    beast::error_code ignored;
    if (g.acceptor) g.acceptor->close(ignored);
  });
  g.io.stop();
  if (g.io_thread.joinable()) g.io_thread.join();
  {
    std::lock_guard lock(g.exec_mu);
    g.exec_stop = true;
  }
  g.exec_cv.notify_all();
  if (g.exec_thread.joinable()) g.exec_thread.join();
  spdlog::info("gateway: stopped");
}

std::uint16_t Gateway::port() const { return impl_->bound_port; }

void Gateway::publish_frame(const vision::Frame& frame) {
  auto& g = *impl_;
  if (!g.started) return;
  auto encoded = std::make_shared<const Bytes>(encode_frame_message(frame, g.frame_seq.fetch_add(1) + 1));
  g.frames_published.fetch_add(1);
  {
    std::lock_guard lock(g.frame_mu);
    if (g.latest_frame) g.frames_dropped.fetch_add(1);
    g.latest_frame = std::move(encoded);
  }
  if (!g.frame_post_pending.exchange(true)) asio::post(g.io, [&g] { g.deliver_frame(); });
}

GatewayStats Gateway::stats() const {
  const auto& g = *impl_;
  return {g.frames_published.load(), g.frames_sent.load(), g.frames_dropped.load(), g.telemetry_sent.load(),
          g.commands.load()};
}

}  // namespace aerovis::gateway
