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

#include "aerovis/sim/simulator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <string_view>

#include "aerovis/protocol/error.hpp"
#include "aerovis/protocol/video.hpp"

namespace aerovis::sim {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::chrono::milliseconds kPollInterval(50);

template <typename Fn>
auto bind_or_throw(std::string_view what, std::uint16_t port, Fn&& fn) {
  try {
    return fn();
  } catch (const net::NetError& e) {
    throw SimStartupError(std::string(what) + " port " + std::to_string(port) + ": " + e.what());
  }
}

Bytes encode_frame(const vision::Frame& frame, std::uint32_t number) {
  protocol::VideoFrameHeader header;
  header.payload_size = static_cast<std::uint32_t>(frame.pixels.size());
  header.display_width = static_cast<std::uint16_t>(frame.width);
  header.display_height = static_cast<std::uint16_t>(frame.height);
  header.frame_number = number;
  Bytes out = protocol::write_video_header(header);
  out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
  return out;
}

}  // namespace

SimPorts SimPorts::from_base(std::uint16_t base) {
  if (base > 65535 - 6) throw std::invalid_argument("ports base too large");
  return SimPorts{static_cast<std::uint16_t>(base + 6), static_cast<std::uint16_t>(base + 4),
                  static_cast<std::uint16_t>(base + 5)};
}

Simulator::Simulator(SimConfig config, SimScene scene, SimPorts ports, const std::string& bind_host)
    : ports_(ports),
      core_(config, scene),
      command_socket_(bind_or_throw("command", ports.command,
                                    [&] { return net::UdpSocket::bind(ports.command, bind_host); })),
      navdata_socket_(bind_or_throw("navdata", ports.navdata,
                                    [&] { return net::UdpSocket::bind(ports.navdata, bind_host); })),
      video_listener_(bind_or_throw("video", ports.video,
                                    [&] { return net::TcpListener::bind(ports.video, bind_host); })) {
  ports_.command = command_socket_.local_port();
  ports_.navdata = navdata_socket_.local_port();
  ports_.video = video_listener_.local_port();

  threads_.emplace_back([this](std::stop_token st) { command_loop(st); });
  threads_.emplace_back([this](std::stop_token st) { navdata_listen_loop(st); });
  threads_.emplace_back([this](std::stop_token st) { video_accept_loop(st); });
  threads_.emplace_back([this](std::stop_token st) { video_send_loop(st); });
  threads_.emplace_back([this](std::stop_token st) { physics_loop(st); });
  spdlog::info("sim: listening command={} navdata={} video={}", ports_.command, ports_.navdata, ports_.video);
}

Simulator::~Simulator() { stop(); }

void Simulator::stop() {
  if (stopped_.exchange(true)) return;
  for (auto& t : threads_) t.request_stop();
  {
    std::lock_guard lock(video_mu_);
    if (video_stream_) video_stream_->shutdown();
  }
  video_cv_.notify_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  std::lock_guard lock(video_mu_);
  video_stream_.reset();
  spdlog::info("sim: stopped");
}

void Simulator::with_core(const std::function<void(SimCore&)>& fn) {
  std::lock_guard lock(core_mu_);
  fn(core_);
}

SimDrone Simulator::drone() const {
  std::lock_guard lock(core_mu_);
  return core_.drone();
}

std::vector<CapturedCommand> Simulator::captured_commands() const {
  std::lock_guard lock(queue_mu_);
  return captured_;
}

void Simulator::clear_captured_commands() {
  std::lock_guard lock(queue_mu_);
  captured_.clear();
}

std::uint64_t Simulator::packets_after(Clock::time_point t) const {
  std::lock_guard lock(queue_mu_);
  return static_cast<std::uint64_t>(
      std::count_if(captured_.begin(), captured_.end(), [&](const CapturedCommand& c) { return c.at > t; }));
}

void Simulator::command_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    auto dgram = command_socket_.receive(kPollInterval);
    if (!dgram) continue;
    const auto now = Clock::now();
    const std::string_view text(reinterpret_cast<const char*>(dgram->data.data()), dgram->data.size());
    for (auto line : protocol::split_at_datagram(text)) {
      try {
        auto cmd = protocol::parse_at(line);
        std::lock_guard lock(queue_mu_);
        captured_.push_back({now, cmd});
        queue_.push_back(std::move(cmd));
      } catch (const protocol::ProtocolError& e) {
        spdlog::debug("sim: rejected command: {}", e.what());
      }
    }
  }
}

void Simulator::navdata_listen_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    auto dgram = navdata_socket_.receive(kPollInterval);
    if (!dgram) continue;
    std::lock_guard lock(navdata_peer_mu_);
    if (!navdata_peer_ || !(*navdata_peer_ == dgram->from)) {
      spdlog::debug("sim: navdata subscriber {}", dgram->from.to_string());
    }
    navdata_peer_ = dgram->from;
  }
}

void Simulator::video_accept_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    auto stream = video_listener_.accept(kPollInterval);
    if (!stream) continue;
    auto shared = std::make_shared<net::TcpStream>(std::move(*stream));
    std::lock_guard lock(video_mu_);
    if (video_stream_) video_stream_->shutdown();
    video_stream_ = std::move(shared);
    pending_frame_.reset();
    spdlog::debug("sim: video client connected");
  }
}

void Simulator::video_send_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    std::shared_ptr<net::TcpStream> stream;
    Bytes frame;
    {
      std::unique_lock lock(video_mu_);
      if (!video_cv_.wait(lock, stop, [&] { return pending_frame_.has_value() && video_stream_; })) return;
      stream = video_stream_;
      frame = std::move(*pending_frame_);
      pending_frame_.reset();
    }
    if (!stream->write_all(frame, std::chrono::milliseconds(1000))) {
      std::lock_guard lock(video_mu_);
      if (video_stream_ == stream) video_stream_.reset();
      spdlog::debug("sim: video client dropped");
      continue;
    }
    frames_sent_.fetch_add(1);
  }
}

void Simulator::physics_loop(std::stop_token stop) {
  const double dt = [&] {
    std::lock_guard lock(core_mu_);
    return core_.config().physics_dt;
  }();
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(dt));
  auto epoch = Clock::now();
  std::uint64_t tick = 0;
  std::uint64_t since_epoch = 0;
  std::uint32_t frame_number = 0;

  while (!stop.stop_requested()) {
    std::vector<protocol::AtCommand> commands;
    {
      std::lock_guard lock(queue_mu_);
      commands.swap(queue_);
    }

    std::optional<Bytes> navdata;
    std::optional<vision::Frame> frame;
    {
      std::lock_guard lock(core_mu_);
      for (const auto& c : commands) core_.apply_command(c);
      core_.step();
      if (core_.link_in_range()) {
        const auto& cfg = core_.config();
        if (tick_due(tick, cfg.physics_dt, cfg.navdata_hz)) {
          std::lock_guard peer_lock(navdata_peer_mu_);
          if (navdata_peer_) navdata = core_.emit_navdata();
        }
        if (tick_due(tick, cfg.physics_dt, cfg.video_fps)) {
          std::lock_guard video_lock(video_mu_);
          if (video_stream_) frame = core_.render();
        }
      }
    }

    if (navdata) {
      std::optional<net::Address> peer;
      {
        std::lock_guard lock(navdata_peer_mu_);
        peer = navdata_peer_;
      }
      if (peer) {
        navdata_socket_.send_to(*peer, *navdata);
        navdata_sent_.fetch_add(1);
      }
    }
    if (frame) {
      Bytes encoded = encode_frame(*frame, ++frame_number);
      {
        std::lock_guard lock(video_mu_);
        pending_frame_ = std::move(encoded);
      }
      video_cv_.notify_all();
    }

    ++tick;
    ++since_epoch;
    auto deadline = epoch + period * since_epoch;
    const auto now = Clock::now();
    if (now > deadline + std::chrono::milliseconds(500)) {
      spdlog::warn("sim: physics loop fell behind, resynchronizing");
      epoch = now;
      since_epoch = 0;
      deadline = now;
    }
    std::this_thread::sleep_until(deadline);
  }
}

}  // namespace aerovis::sim
