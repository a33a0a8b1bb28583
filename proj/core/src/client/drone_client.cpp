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

#include "aerovis/client/drone_client.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "aerovis/protocol/error.hpp"
#include "aerovis/protocol/navdata.hpp"
#include "aerovis/protocol/video.hpp"

namespace aerovis::client {

namespace {

using Clock = std::chrono::steady_clock;
constexpr auto kPoll = std::chrono::milliseconds(50);
constexpr auto kTriggerRetry = std::chrono::milliseconds(1000);
constexpr std::uint32_t kMaxVideoPayload = 64u << 20;

thread_local bool t_in_video_callback = false;

void forbid_in_callback(const char* op) {
  if (t_in_video_callback) {
    throw StateError(FlightState::kDisconnected,
                     std::string(op) + " must not be called from a video callback");
  }
}

const protocol::RefBits kRefLand{false, false};
const protocol::RefBits kRefTakeoff{true, false};
const protocol::RefBits kRefEmergency{false, true};

}  // namespace

struct DroneClient::Session {
  explicit Session(const DroneEndpoint& e)
      : endpoint(e),
        command_addr(net::Address::resolve(e.host, e.command_port)),
        navdata_addr(net::Address::resolve(e.host, e.navdata_port)),
        video_addr(net::Address::resolve(e.host, e.video_port)),
        command_socket(net::UdpSocket::bind(0)),
        navdata_socket(net::UdpSocket::bind(0)) {}

  DroneEndpoint endpoint;
  net::Address command_addr;
  net::Address navdata_addr;
  net::Address video_addr;
  net::UdpSocket command_socket;
  net::UdpSocket navdata_socket;
  std::uint32_t last_navdata_seq = 0;

  std::jthread command_thread;
  std::jthread navdata_thread;

  std::mutex video_mu;
  std::shared_ptr<net::TcpStream> video_stream;
  std::jthread video_thread;
  FrameCallback on_frame;
  CloseCallback on_close;
};

DroneEndpoint DroneEndpoint::with_ports_base(std::string host, std::uint16_t base) {
  if (base > 65535 - 6) throw std::invalid_argument("ports base too large");
  DroneEndpoint e;
  e.host = std::move(host);
  e.navdata_port = static_cast<std::uint16_t>(base + 4);
  e.video_port = static_cast<std::uint16_t>(base + 5);
  e.command_port = static_cast<std::uint16_t>(base + 6);
  return e;
}

void DroneEndpoint::validate() const {
  if (command_port == 0 || navdata_port == 0 || video_port == 0) {
    throw std::invalid_argument("endpoint ports must be non-zero");
  }
  if (command_port == navdata_port || command_port == video_port || navdata_port == video_port) {
    throw std::invalid_argument("endpoint ports must be distinct");
  }
}

DroneClient::DroneClient() = default;

DroneClient::~DroneClient() {
  try {
    disconnect();
  } catch (const std::exception& e) {
    spdlog::warn("client: disconnect during destruction failed: {}", e.what());
  }
}

void DroneClient::require(std::initializer_list<FlightState> allowed, const char* op) const {
  const auto s = state();
  if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
    throw StateError(s, std::string(op) + " not allowed");
  }
}

void DroneClient::transition(FlightState to) {
  StateObserver observer;
  FlightState from;
  {
    std::lock_guard lock(state_mu_);
    from = state_.load();
    if (from == to) return;
    state_.store(to);
    observer = observer_;
  }
  state_cv_.notify_all();
  spdlog::debug("client: {} -> {}", to_string(from), to_string(to));
  if (observer) observer(from, to);
}

void DroneClient::transition_if(FlightState from, FlightState to) {
  StateObserver observer;
  {
    std::lock_guard lock(state_mu_);
    if (state_.load() != from) return;
    state_.store(to);
    observer = observer_;
  }
  state_cv_.notify_all();
  spdlog::debug("client: {} -> {}", to_string(from), to_string(to));
  if (observer) observer(from, to);
}

void DroneClient::set_state_observer(StateObserver observer) {
  std::lock_guard lock(state_mu_);
  observer_ = std::move(observer);
}

bool DroneClient::wait_for_state(FlightState target, std::chrono::milliseconds timeout) {
  forbid_in_callback("wait_for_state");
  std::unique_lock lock(state_mu_);
  return state_cv_.wait_for(lock, timeout, [&] { return state_.load() == target; });
}

void DroneClient::kick() {
  {
    std::lock_guard lock(cmd_mu_);
    kicked_ = true;
  }
  cmd_cv_.notify_all();
}

void DroneClient::publish(std::shared_ptr<const TelemetrySnapshot> snapshot) {
  std::atomic_store(&snapshot_, std::move(snapshot));
}

TelemetrySnapshot DroneClient::telemetry_snapshot() const {
  const auto s = state();
  if (s == FlightState::kDisconnected) throw StateError(s, "telemetry requires a connection");
  const auto snap = std::atomic_load(&snapshot_);
  return snap ? *snap : TelemetrySnapshot{};
}

LinkStatus DroneClient::connect(const DroneEndpoint& endpoint) {
  forbid_in_callback("connect");
  std::lock_guard life(lifecycle_mu_);
  std::unique_lock op(op_mu_);
  if (state() != FlightState::kDisconnected) throw StateError(state(), "already connected");
  endpoint.validate();

  auto session = std::make_unique<Session>(endpoint);

  {
    std::lock_guard lock(cmd_mu_);
    one_shots_.clear();
    repeated_ref_.reset();
    repeated_pcmd_.reset();
    ignore_emergency_bit_ = false;
    kicked_ = false;
    one_shots_.push_back(protocol::AtCommand::config(0, "general:navdata_demo", "TRUE"));
  }
  seq_.store(0);
  watchdog_seen_.store(false);
  fly_bit_.store(false);
  frames_received_.store(0);
  publish(nullptr);

  Session& live = *session;
  session_ = std::move(session);
  transition(FlightState::kLanded);
  live.command_thread = std::jthread([this, &live](std::stop_token st) { command_loop(st, live); });
  live.navdata_thread = std::jthread([this, &live](std::stop_token st) { navdata_loop(st, live); });
  op.unlock();

  const auto deadline = Clock::now() + kLinkTimeout;
  while (Clock::now() < deadline) {
    const auto snap = std::atomic_load(&snapshot_);
    if (snap && snap->link_ok) {
      spdlog::info("client: linked to {}", endpoint.host);
      return LinkStatus::kLinked;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  spdlog::warn("client: no navdata from {} within {} ms", endpoint.host, kLinkTimeout.count());
  return LinkStatus::kLinkTimeout;
}

void DroneClient::stop_threads(Session& session) {
  session.command_thread.request_stop();
  session.navdata_thread.request_stop();
  session.video_thread.request_stop();
  {
    std::lock_guard lock(session.video_mu);
    if (session.video_stream) session.video_stream->shutdown();
  }
  if (session.command_thread.joinable()) session.command_thread.join();
  if (session.navdata_thread.joinable()) session.navdata_thread.join();
  if (session.video_thread.joinable()) session.video_thread.join();
}

void DroneClient::disconnect() {
  forbid_in_callback("disconnect");
  std::lock_guard life(lifecycle_mu_);
  std::unique_ptr<Session> old;
  {
    std::lock_guard op(op_mu_);
    if (!session_ && state() == FlightState::kDisconnected) return;
    old = std::move(session_);
    {
      std::lock_guard lock(cmd_mu_);
      one_shots_.clear();
      repeated_ref_.reset();
      repeated_pcmd_.reset();
    }
    transition(FlightState::kDisconnected);
  }
  if (old) stop_threads(*old);
  publish(nullptr);
  spdlog::info("client: disconnected");
}

void DroneClient::takeoff() {
  std::lock_guard op(op_mu_);
  require({FlightState::kLanded}, "takeoff");
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_.reset();
    repeated_ref_ = kRefTakeoff;
  }
  transition(FlightState::kTakingOff);
  kick();
}

void DroneClient::land() {
  std::lock_guard op(op_mu_);
  require({FlightState::kTakingOff, FlightState::kFlying, FlightState::kHovering}, "land");
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_.reset();
    repeated_ref_ = kRefLand;
  }
  transition(FlightState::kLanding);
  kick();
}

void DroneClient::hover() {
  std::lock_guard op(op_mu_);
  require({FlightState::kFlying, FlightState::kHovering}, "hover");
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_ = protocol::PcmdArgs{};
  }
  transition(FlightState::kHovering);
  kick();
}

void DroneClient::move(MoveDirection direction, double speed) {
  if (std::isnan(speed)) throw std::invalid_argument("move speed is NaN");
  if (speed <= 0.0 || speed > 1.0) {
    const double clamped = std::clamp(speed, 0.01, 1.0);
    spdlog::warn("client: move speed {} clamped to {}", speed, clamped);
    speed = clamped;
  }
  std::lock_guard op(op_mu_);
  require({FlightState::kFlying, FlightState::kHovering}, "move");
  const auto sticks = sticks_for(direction, static_cast<float>(speed));
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_ = protocol::PcmdArgs{true, sticks.roll, sticks.pitch, sticks.gaz, sticks.yaw};
  }
  transition(FlightState::kFlying);
  kick();
}

void DroneClient::emergency() {
  std::lock_guard op(op_mu_);
  const auto s = state();
  if (s == FlightState::kDisconnected) throw StateError(s, "emergency requires a connection");
  if (s == FlightState::kEmergency) return;
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_.reset();
    repeated_ref_.reset();
    // The drone reacts to the rising edge of the emergency bit, so a
    // plain REF follows to re-arm it.
    one_shots_.push_back(protocol::AtCommand::ref(0, kRefEmergency));
    one_shots_.push_back(protocol::AtCommand::ref(0, kRefLand));
  }
  transition(FlightState::kEmergency);
  kick();
}

void DroneClient::reset_emergency() {
  std::lock_guard op(op_mu_);
  require({FlightState::kEmergency}, "reset");
  {
    std::lock_guard lock(cmd_mu_);
    repeated_pcmd_.reset();
    repeated_ref_.reset();
    one_shots_.push_back(protocol::AtCommand::ref(0, kRefEmergency));
    one_shots_.push_back(protocol::AtCommand::ref(0, kRefLand));
    ignore_emergency_bit_ = true;
  }
  transition(FlightState::kLanded);
  kick();
}

void DroneClient::flat_trim() {
  std::lock_guard op(op_mu_);
  require({FlightState::kLanded}, "trim");
  {
    std::lock_guard lock(cmd_mu_);
    one_shots_.push_back(protocol::AtCommand::ftrim(0));
  }
  kick();
}

void DroneClient::command_loop(std::stop_token stop, Session& session) {
  auto& socket = session.command_socket;
  const auto to = session.command_addr;
  while (!stop.stop_requested()) {
    std::vector<protocol::AtCommand> batch;
    {
      std::unique_lock lock(cmd_mu_);
      cmd_cv_.wait_for(lock, stop, kCommandPeriod, [&] { return kicked_; });
      if (stop.stop_requested()) return;
      kicked_ = false;
      while (!one_shots_.empty()) {
        batch.push_back(std::move(one_shots_.front()));
        one_shots_.pop_front();
      }
      if (repeated_ref_) {
        batch.push_back(protocol::AtCommand::ref(0, *repeated_ref_));
      } else if (repeated_pcmd_) {
        batch.push_back(protocol::AtCommand::pcmd(0, *repeated_pcmd_));
      } else {
        batch.push_back(protocol::AtCommand::comwdg(0));
      }
    }
    if (watchdog_seen_.load() && batch.back().kind != protocol::CommandKind::kComwdg) {
      batch.push_back(protocol::AtCommand::comwdg(0));
    }

    std::string datagram;
    for (auto& c : batch) {
      c.seq = seq_.fetch_add(1) + 1;
      datagram += protocol::encode_at(c);
    }
    socket.send_to(to, ByteView(reinterpret_cast<const std::uint8_t*>(datagram.data()), datagram.size()));
  }
}

void DroneClient::navdata_loop(std::stop_token stop, Session& session) {
  auto& socket = session.navdata_socket;
  const auto to = session.navdata_addr;
  const ByteView trigger(protocol::kNavdataTrigger, sizeof(protocol::kNavdataTrigger));
  socket.send_to(to, trigger);
  auto last_trigger = Clock::now();
  auto last_packet = Clock::time_point{};

  while (!stop.stop_requested()) {
    if (auto d = socket.receive(kPoll)) {
      on_navdata(session, d->data);
      last_packet = Clock::now();
    }
    const auto now = Clock::now();
    const bool silent = last_packet == Clock::time_point{} || now - last_packet > kLinkTimeout;
    if (silent) {
      const auto snap = std::atomic_load(&snapshot_);
      if (snap && snap->link_ok) {
        auto lost = std::make_shared<TelemetrySnapshot>(*snap);
        lost->link_ok = false;
        publish(std::move(lost));
        spdlog::warn("client: navdata link lost");
      }
    }
    if ((last_packet == Clock::time_point{} || now - last_packet > kTriggerRetry) &&
        now - last_trigger > kTriggerRetry) {
      socket.send_to(to, trigger);
      last_trigger = now;
    }
  }
}

void DroneClient::on_navdata(Session& session, ByteView bytes) {
  protocol::NavdataPacket packet;
  try {
    packet = protocol::parse_navdata(bytes);
  } catch (const protocol::ProtocolError& e) {
    spdlog::debug("client: dropping navdata: {}", e.what());
    return;
  }
  auto& last_seq = session.last_navdata_seq;
  if (packet.seq <= last_seq && packet.seq > 1) return;
  last_seq = packet.seq;

  auto snap = std::make_shared<TelemetrySnapshot>();
  snap->state_mask = packet.state_mask;
  snap->navdata_seq = packet.seq;
  snap->last_update = Clock::now();
  snap->link_ok = true;
  if (const auto demo = protocol::find_demo(packet)) {
    snap->battery_percent = std::clamp(static_cast<double>(demo->battery_percent), 0.0, 100.0);
    snap->pitch_deg = demo->pitch_mdeg / 1000.0;
    snap->roll_deg = demo->roll_mdeg / 1000.0;
    snap->yaw_deg = demo->yaw_mdeg / 1000.0;
    snap->altitude_m = std::max(0.0, demo->altitude_mm / 1000.0);
    snap->vx = demo->vx_mm_s / 1000.0;
    snap->vy = demo->vy_mm_s / 1000.0;
    snap->vz = demo->vz_mm_s / 1000.0;
    snap->drone_state = flight_state_from_ctrl(demo->ctrl_state);
  }
  const double altitude = snap->altitude_m;
  const auto reported = snap->drone_state;
  publish(std::move(snap));

  namespace bits = protocol::state_bits;
  const bool flying = packet.state_mask & bits::kFlying;
  const bool emergency_bit = packet.state_mask & bits::kEmergency;
  fly_bit_.store(flying);
  watchdog_seen_.store(packet.state_mask & bits::kWatchdog);

  bool enter_emergency = false;
  {
    std::lock_guard lock(cmd_mu_);
    if (repeated_ref_ == kRefTakeoff && flying) repeated_ref_.reset();
    if (repeated_ref_ == kRefLand && !flying) repeated_ref_.reset();
    if (!emergency_bit) {
      ignore_emergency_bit_ = false;
    } else if (!ignore_emergency_bit_ && state() != FlightState::kEmergency) {
      repeated_ref_.reset();
      repeated_pcmd_.reset();
      enter_emergency = true;
    }
  }

  if (enter_emergency) {
    const auto s = state();
    if (s != FlightState::kDisconnected && s != FlightState::kEmergency) transition(FlightState::kEmergency);
    return;
  }
  if (altitude >= kFlyingAltitude) transition_if(FlightState::kTakingOff, FlightState::kFlying);
  if (altitude <= kLandedAltitude && !flying) transition_if(FlightState::kLanding, FlightState::kLanded);
  if (reported == FlightState::kLanding) {
    transition_if(FlightState::kFlying, FlightState::kLanding);
    transition_if(FlightState::kHovering, FlightState::kLanding);
  }
}

void DroneClient::connect_video(FrameCallback on_frame, CloseCallback on_close) {
  forbid_in_callback("connect_video");
  std::lock_guard life(lifecycle_mu_);
  if (!session_) throw StateError(state(), "connect_video requires a connection");
  Session& live = *session_;
  if (live.video_thread.joinable()) {
    live.video_thread.request_stop();
    {
      std::lock_guard lock(live.video_mu);
      if (live.video_stream) live.video_stream->shutdown();
    }
    live.video_thread.join();
  }
  auto stream = std::make_shared<net::TcpStream>(
      net::TcpStream::connect(live.video_addr, std::chrono::milliseconds(2000)));
  {
    std::lock_guard lock(live.video_mu);
    live.video_stream = stream;
  }
  live.on_frame = std::move(on_frame);
  live.on_close = std::move(on_close);
  live.video_thread =
      std::jthread([this, &live, stream](std::stop_token st) { video_loop(st, live, stream); });
}

void DroneClient::video_loop(std::stop_token stop, Session& session,
                             std::shared_ptr<net::TcpStream> stream) {
  const auto on_frame = session.on_frame;
  const auto on_close = session.on_close;
  Bytes buf;
  std::array<std::uint8_t, 1 << 16> chunk{};
  std::string reason = "stream closed";
  const auto& sig = protocol::kPaveSignature;

  auto deliver = [&](const vision::Frame& frame) {
    frames_received_.fetch_add(1);
    if (!on_frame) return;
    t_in_video_callback = true;
    try {
      on_frame(frame);
    } catch (const std::exception& e) {
      spdlog::warn("client: frame callback threw: {}", e.what());
    } catch (...) {
      spdlog::warn("client: frame callback threw a non-standard exception");
    }
    t_in_video_callback = false;
  };

  try {
    while (!stop.stop_requested()) {
      const auto n = stream->read_some(chunk, kPoll);
      if (!n) continue;
      if (*n == 0) {
        reason = "stream closed by peer";
        break;
      }
      buf.insert(buf.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(*n));

      for (;;) {
        const auto it = std::search(buf.begin(), buf.end(), sig.begin(), sig.end());
        if (it == buf.end()) {
          const std::size_t keep = std::min<std::size_t>(buf.size(), sig.size() - 1);
          buf.erase(buf.begin(), buf.end() - static_cast<std::ptrdiff_t>(keep));
          break;
        }
        if (it != buf.begin()) {
          spdlog::debug("client: video resync skipped {} bytes", it - buf.begin());
          buf.erase(buf.begin(), it);
        }
        if (buf.size() < protocol::kVideoHeaderFixedSize) break;
        protocol::VideoFrameHeader header;
        try {
          header = protocol::parse_video_header(buf);
        } catch (const protocol::ProtocolError& e) {
          spdlog::debug("client: bad video header: {}", e.what());
          buf.erase(buf.begin());
          continue;
        }
        if (header.payload_size > kMaxVideoPayload) {
          buf.erase(buf.begin());
          continue;
        }
        const std::size_t total = std::size_t{header.header_size} + header.payload_size;
        if (buf.size() < total) break;
        if (header.codec == protocol::kCodecRawRgb24) {
          vision::Frame frame;
          frame.width = header.display_width;
          frame.height = header.display_height;
          frame.pixels.assign(buf.begin() + header.header_size, buf.begin() + static_cast<std::ptrdiff_t>(total));
          deliver(frame);
        } else {
          spdlog::debug("client: skipping frame with codec {}", header.codec);
        }
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(total));
      }
    }
  } catch (const net::NetError& e) {
    reason = e.what();
  }
  if (stop.stop_requested()) reason = "disconnected";
  spdlog::debug("client: video loop ended: {}", reason);
  if (on_close) {
    t_in_video_callback = true;
    try {
      on_close(reason);
    } catch (const std::exception& e) {
      spdlog::warn("client: close callback threw: {}", e.what());
    }
    t_in_video_callback = false;
  }
}

}  // namespace aerovis::client
