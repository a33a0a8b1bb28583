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

// Flight vocabulary shared by the client, the simulator and the controllers.

#ifndef AEROVIS_FLIGHT_HPP_
#define AEROVIS_FLIGHT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aerovis {

enum class FlightState : std::uint8_t {
  kDisconnected = 0,
  kLanded = 1,
  kTakingOff = 2,
  kFlying = 3,
  kHovering = 4,
  kLanding = 5,
  kEmergency = 6,
};

std::string_view to_string(FlightState state) noexcept;
std::optional<FlightState> flight_state_from_ctrl(std::uint32_t ctrl_state) noexcept;
inline std::uint32_t to_ctrl_state(FlightState state) noexcept {
  return std::uint32_t{static_cast<std::uint8_t>(state)} << 16;
}

// Edge set of the flight state machine:
//   Disconnected -> Landed                        (connect)
//   Landed -> TakingOff                           (takeoff)
//   TakingOff -> Flying                           (altitude reached)
//   Flying <-> Hovering, Flying -> Flying         (move / hover)
//   TakingOff | Flying | Hovering -> Landing      (land)
//   Landing -> Landed                             (ground reached)
//   any -> Emergency                              (emergency)
//   Emergency -> Landed                           (reset)
//   any -> Disconnected                           (disconnect)
bool is_allowed_transition(FlightState from, FlightState to) noexcept;

inline bool is_airborne(FlightState s) noexcept {
  return s == FlightState::kFlying || s == FlightState::kHovering;
}

enum class MoveDirection : std::uint8_t { kRight, kLeft, kUp, kDown, kForward, kBackward };

inline constexpr std::array<MoveDirection, 6> kAllDirections = {
    MoveDirection::kRight, MoveDirection::kLeft,    MoveDirection::kUp,
    MoveDirection::kDown,  MoveDirection::kForward, MoveDirection::kBackward};

std::string_view to_string(MoveDirection direction) noexcept;
std::optional<MoveDirection> move_direction_from_string(std::string_view name) noexcept;

// Stick fractions for a move command; all other channels are zero.
struct StickCommand {
  float roll = 0.0f;
  float pitch = 0.0f;
  float gaz = 0.0f;
  float yaw = 0.0f;
};

// right: +roll, left: -roll, forward: -pitch, backward: +pitch,
// up: +gaz, down: -gaz.
StickCommand sticks_for(MoveDirection direction, float speed) noexcept;

// A command was issued in a flight state that does not allow it.
class StateError : public std::runtime_error {
 public:
  StateError(FlightState current, const std::string& message)
      : std::runtime_error(message + " (state: " + std::string(to_string(current)) + ")"),
        current_(current) {}

  FlightState current() const noexcept { return current_; }

 private:
  FlightState current_;
};

// Subset of a flight session used by the tracking and gesture controllers.
class FlightCommands {
 public:
  virtual ~FlightCommands() = default;

  virtual void takeoff() = 0;
  virtual void land() = 0;
  virtual void hover() = 0;
  virtual void move(MoveDirection direction, double speed) = 0;
};

}  // namespace aerovis

#endif  // AEROVIS_FLIGHT_HPP_
