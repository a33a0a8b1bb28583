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

#include "aerovis/flight.hpp"

namespace aerovis {

std::string_view to_string(FlightState state) noexcept {
  switch (state) {
    case FlightState::kDisconnected: return "Disconnected";
    case FlightState::kLanded: return "Landed";
    case FlightState::kTakingOff: return "TakingOff";
    case FlightState::kFlying: return "Flying";
    case FlightState::kHovering: return "Hovering";
    case FlightState::kLanding: return "Landing";
    case FlightState::kEmergency: return "Emergency";
  }
  return "Unknown";
}

std::optional<FlightState> flight_state_from_ctrl(std::uint32_t ctrl_state) noexcept {
  const std::uint32_t major = ctrl_state >> 16;
  if (major > static_cast<std::uint32_t>(FlightState::kEmergency)) return std::nullopt;
  return static_cast<FlightState>(major);
}

bool is_allowed_transition(FlightState from, FlightState to) noexcept {
  using S = FlightState;
  if (to == S::kEmergency || to == S::kDisconnected) return true;
  switch (from) {
    case S::kDisconnected: return to == S::kLanded;
    case S::kLanded: return to == S::kTakingOff;
    case S::kTakingOff: return to == S::kFlying || to == S::kLanding;
    case S::kFlying:
    case S::kHovering: return to == S::kFlying || to == S::kHovering || to == S::kLanding;
    case S::kLanding: return to == S::kLanded;
    case S::kEmergency: return to == S::kLanded;
  }
  return false;
}

std::string_view to_string(MoveDirection direction) noexcept {
  switch (direction) {
    case MoveDirection::kRight: return "right";
    case MoveDirection::kLeft: return "left";
    case MoveDirection::kUp: return "up";
    case MoveDirection::kDown: return "down";
    case MoveDirection::kForward: return "forward";
    case MoveDirection::kBackward: return "backward";
  }
  return "?";
}

std::optional<MoveDirection> move_direction_from_string(std::string_view name) noexcept {
  for (auto d : kAllDirections) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

StickCommand sticks_for(MoveDirection direction, float speed) noexcept {
  StickCommand s;
  switch (direction) {
    case MoveDirection::kRight: s.roll = speed; break;
    case MoveDirection::kLeft: s.roll = -speed; break;
    case MoveDirection::kForward: s.pitch = -speed; break;
    case MoveDirection::kBackward: s.pitch = speed; break;
    case MoveDirection::kUp: s.gaz = speed; break;
    case MoveDirection::kDown: s.gaz = -speed; break;
  }
  return s;
}

}  // namespace aerovis
