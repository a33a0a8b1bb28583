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

#ifndef AEROVIS_CLIENT_DRONE_CLIENT_HPP_
#define AEROVIS_CLIENT_DRONE_CLIENT_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "aerovis/flight.hpp"
#include "aerovis/net/socket.hpp"
#include "aerovis/protocol/at_command.hpp"
#include "aerovis/vision/frame.hpp"

namespace aerovis::client {

struct DroneEndpoint {
  std::string host = "192.168.1.1";
  std::uint16_t command_port = protocol::kCommandPort;
  std::uint16_t navdata_port = protocol::kNavdataPort;
  std::uint16_t video_port = protocol::kVideoPort;

  // navdata = base + 4, video = base + 5, command = base + 6.
  static DroneEndpoint with_ports_base(std::string host, std::uint16_t base);

  // Throws std::invalid_argument if two ports coincide or any is zero.
  void validate() const;
};

struct TelemetrySnapshot {
  double battery_percent = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double yaw_deg = 0.0;
  double altitude_m = 0.0;
  double vx = 0.0;  // m/s, body frame
  double vy = 0.0;
  double vz = 0.0;
  std::uint32_t state_mask = 0;
  std::uint32_t navdata_seq = 0;
  std::optional<FlightState> drone_state;  // as reported in the DEMO block
  std::chrono::steady_clock::time_point last_update{};
  bool link_ok = false;
};

enum class LinkStatus { kLinked, kLinkTimeout };

inline constexpr auto kCommandPeriod = std::chrono::milliseconds(30);
inline constexpr auto kLinkTimeout = std::chrono::milliseconds(2000);
inline constexpr double kFlyingAltitude = 0.5;  // m
inline constexpr double kLandedAltitude = 0.05;  // m

using FrameCallback = std::function<void(const vision::Frame&)>;
using CloseCallback = std::function<void(const std::string& reason)>;
using StateObserver = std::function<void(FlightState from, FlightState to)>;

// Flight session against one drone (or simulator). Safe to share between
// threads. Frame callbacks run on the video loop and may issue non-blocking
// commands (takeoff, land, hover, move, emergency...); calling connect,
// connect_video, disconnect or wait_for_state from inside a frame callback
// throws StateError.
class DroneClient : public FlightCommands {
 public:
  DroneClient();
  ~DroneClient() override;

  DroneClient(const DroneClient&) = delete;
  DroneClient& operator=(const DroneClient&) = delete;

  // Blocks until the first navdata packet or kLinkTimeout. On timeout the
  // session stays connected for commands with link_ok = false.
  // Throws StateError("already connected") and net::NetError.
  LinkStatus connect(const DroneEndpoint& endpoint);
  void disconnect();
  bool connected() const noexcept { return state() != FlightState::kDisconnected; }

  void takeoff() override;
  void land() override;
  void hover() override;
  // speed is clamped into [0.01, 1]; NaN throws std::invalid_argument.
  void move(MoveDirection direction, double speed) override;
  void emergency();
  void reset_emergency();
  void flat_trim();

  void connect_video(FrameCallback on_frame, CloseCallback on_close = {});

  TelemetrySnapshot telemetry_snapshot() const;
  FlightState state() const noexcept { return state_.load(); }
  bool wait_for_state(FlightState target, std::chrono::milliseconds timeout);
  void set_state_observer(StateObserver observer);

  std::uint32_t last_seq() const noexcept { return seq_.load(); }
  std::uint64_t frames_received() const noexcept { return frames_received_.load(); }

 private:
  struct Session;

  void require(std::initializer_list<FlightState> allowed, const char* op) const;
  void transition(FlightState to);
  void transition_if(FlightState from, FlightState to);
  void kick();

  void command_loop(std::stop_token stop, Session& session);
  void navdata_loop(std::stop_token stop, Session& session);
  void video_loop(std::stop_token stop, Session& session, std::shared_ptr<net::TcpStream> stream);
  void on_navdata(Session& session, ByteView bytes);
  void publish(std::shared_ptr<const TelemetrySnapshot> snapshot);
  static void stop_threads(Session& session);

  std::atomic<FlightState> state_{FlightState::kDisconnected};
  std::atomic<std::uint32_t> seq_{0};
  std::atomic<std::uint64_t> frames_received_{0};

  // connect / disconnect / connect_video. Never held by command operations,
  // so joining the loops cannot wait on a frame callback that issues one.
  std::mutex lifecycle_mu_;
  // Serializes command operations and session state changes.
  mutable std::mutex op_mu_;

  std::mutex state_mu_;
  std::condition_variable state_cv_;
  StateObserver observer_;

  // Command channel state, guarded by cmd_mu_.
  std::mutex cmd_mu_;
  std::condition_variable_any cmd_cv_;
  bool kicked_ = false;
  std::deque<protocol::AtCommand> one_shots_;
  std::optional<protocol::RefBits> repeated_ref_;
  std::optional<protocol::PcmdArgs> repeated_pcmd_;
  bool ignore_emergency_bit_ = false;

  std::atomic<bool> watchdog_seen_{false};
  std::atomic<bool> fly_bit_{false};

  std::shared_ptr<const TelemetrySnapshot> snapshot_;

  std::unique_ptr<Session> session_;
};

}  // namespace aerovis::client

#endif  // AEROVIS_CLIENT_DRONE_CLIENT_HPP_
