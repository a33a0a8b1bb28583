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

#ifndef AEROVIS_GATEWAY_GATEWAY_HPP_
#define AEROVIS_GATEWAY_GATEWAY_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "aerovis/client/drone_client.hpp"
#include "aerovis/control/tracker.hpp"
#include "aerovis/gateway/envelope.hpp"
#include "aerovis/vision/frame.hpp"

namespace aerovis::gateway {

inline constexpr std::uint16_t kDefaultPort = 8642;

struct GatewayConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;
  double telemetry_hz = 10.0;
  // Frames to one operator are spaced at least this far apart.
  std::chrono::milliseconds min_frame_interval{50};
};

class GatewayStartupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DroneClient plus an optional VisionLoop behind the command vocabulary.
class ClientBackend final : public GatewayBackend {
 public:
  ClientBackend(client::DroneClient& client, control::VisionLoop* vision);

  void execute(const CommandRequest& request) override;
  TelemetryView telemetry() override;

 private:
  client::DroneClient& client_;
  control::VisionLoop* vision_;
};

struct GatewayStats {
  std::uint64_t frames_published = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_dropped = 0;
  std::uint64_t telemetry_sent = 0;
  std::uint64_t commands = 0;
};

// HTTP + WebSocket front end. `/` and other paths serve the UI bundle from
// ui_dir, `/healthz` answers "ok", `/ws` takes one operator at a time.
class Gateway {
 public:
  Gateway(GatewayBackend& backend, GatewayConfig config);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and starts serving; throws GatewayStartupError on bind failure.
  void start();
  void stop();
  std::uint16_t port() const;

  // Safe from any thread and never blocks on the network: only the newest
  // unsent frame is kept.
  void publish_frame(const vision::Frame& frame);

  GatewayStats stats() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace aerovis::gateway

#endif  // AEROVIS_GATEWAY_GATEWAY_HPP_
