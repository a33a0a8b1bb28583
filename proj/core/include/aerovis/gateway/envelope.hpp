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

// Browser-facing message formats.
//
// Text frames carry JSON envelopes:
//   {"type":"command","id":<any>,"name":"move","params":{"direction":"up","speed":0.2}}
//   {"type":"ack","id":<same>}            {"type":"error","id":<same|null>,"message":"..."}
//   {"type":"telemetry", ...}             {"type":"track","enabled":true,"action":"hover"}
// Binary frames carry one video frame: u16 width, u16 height, u32 seq
// (little-endian), then width*height*3 RGB bytes.

#ifndef AEROVIS_GATEWAY_ENVELOPE_HPP_
#define AEROVIS_GATEWAY_ENVELOPE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "aerovis/client/drone_client.hpp"
#include "aerovis/control/tracker.hpp"
#include "aerovis/flight.hpp"
#include "aerovis/protocol/bytes.hpp"
#include "aerovis/vision/frame.hpp"

namespace aerovis::gateway {

inline constexpr std::array<std::string_view, 8> kCommandNames = {
    "takeoff", "land", "hover", "emergency", "reset", "trim", "move", "track"};

struct CommandRequest {
  std::string id_json = "null";  // the client's id, re-serialized verbatim
  std::string name;
  MoveDirection direction = MoveDirection::kUp;  // move only
  double speed = 0.2;                            // move only
  bool enabled = false;                          // track only

  bool is_emergency() const noexcept { return name == "emergency"; }
};

// A parsed command, or the error envelope to send back.
using ParsedMessage = std::variant<CommandRequest, std::string>;
ParsedMessage parse_ws_message(std::string_view text);

std::string ack_envelope(const std::string& id_json);
std::string error_envelope(const std::string& id_json, std::string_view message);

struct TelemetryView {
  client::TelemetrySnapshot snapshot;
  FlightState state = FlightState::kDisconnected;
  control::TrackAction action = control::TrackAction::kHover;
  std::optional<vision::NormalizedBox> box;
  bool tracking = false;
};

std::string telemetry_envelope(const TelemetryView& view);
std::string track_envelope(bool enabled, control::TrackAction action);

// The operations the gateway drives.
class GatewayBackend {
 public:
  virtual ~GatewayBackend() = default;
  // Throws StateError or std::invalid_argument; the message is sent to the
  // operator verbatim.
  virtual void execute(const CommandRequest& request) = 0;
  virtual TelemetryView telemetry() = 0;
};

// Parses, executes, and returns the ack or error envelope.
std::string handle_ws_message(std::string_view text, GatewayBackend& backend);
// Executes an already parsed request.
std::string execute_request(const CommandRequest& request, GatewayBackend& backend);

Bytes encode_frame_message(const vision::Frame& frame, std::uint32_t seq);

struct FrameMessage {
  vision::Frame frame;
  std::uint32_t seq = 0;
};
// Throws std::invalid_argument on a short buffer or a payload length that
// does not match the dimensions.
FrameMessage decode_frame_message(ByteView bytes);

}  // namespace aerovis::gateway

#endif  // AEROVIS_GATEWAY_ENVELOPE_HPP_
