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

#ifndef AEROVIS_CONTROL_TRACKER_HPP_
#define AEROVIS_CONTROL_TRACKER_HPP_

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "aerovis/flight.hpp"
#include "aerovis/vision/frame.hpp"
#include "aerovis/vision/gesture_mlp.hpp"

namespace aerovis::control {

enum class TrackAction : std::uint8_t { kHover, kRight, kLeft, kDown, kUp, kBackward, kForward };

inline constexpr std::array<TrackAction, 7> kAllTrackActions = {
    TrackAction::kHover, TrackAction::kRight,    TrackAction::kLeft,   TrackAction::kDown,
    TrackAction::kUp,    TrackAction::kBackward, TrackAction::kForward};

// Lowercase wire names: "hover", "right", "left", "down", "up", "backward",
// "forward".
std::string_view to_string(TrackAction action) noexcept;
std::optional<TrackAction> track_action_from_string(std::string_view name) noexcept;

// nullopt for hover.
std::optional<MoveDirection> direction_for(TrackAction action) noexcept;

struct TrackerConfig {
  double eps_horizontal = 0.1;
  double eps_vertical = 0.3;
  double eps_height = 0.3;
  int target_class = 0;
  double move_speed = 0.2;
  // false: back off only when h >= 1 + eps_height (never fires for h <= 1).
  // true:  back off when h >= 0.5 + eps_height.
  bool corrected_height_rule = false;
  // Issue hover() when no target is in view.
  bool hover_on_no_detection = true;

  // Throws std::invalid_argument unless every eps lies in (0, 0.5).
  void validate() const;
};

// Decision ladder over the target box, first match wins, comparisons
// inclusive:
//   1. |x-0.5| <= eps_h and |y-0.5| <= eps_v and |h-0.5| <= eps_height -> hover
//   2. x >= 0.5 + eps_h                                                -> right
//   3. x <= 0.5 - eps_h                                                -> left
//   4. y >= 0.5 + eps_v                                                -> down
//   5. y <= 0.5 - eps_v                                                -> up
//   6. h >= backoff threshold                                          -> backward
//   7. otherwise                                                       -> forward
// The box width does not participate.
TrackAction take_action(const vision::NormalizedBox& box, const TrackerConfig& cfg = {});

// Picks the first detection of the target class, decides, and issues the
// matching session command. State errors from the session propagate.
TrackAction track_step(std::span<const vision::Detection> detections, const TrackerConfig& cfg,
                       FlightCommands& session);

// takeoff -> takeoff(), land -> land(), the four directional gestures ->
// move(direction, 0.2).
void gesture_to_command(vision::Gesture gesture, FlightCommands& session);

struct TrackResult {
  TrackAction action = TrackAction::kHover;
  std::optional<vision::NormalizedBox> box;
  std::uint64_t frames = 0;
};

// Detector + decision ladder + session, driven once per video frame.
class TrackingController {
 public:
  TrackingController(const vision::Detector& detector, TrackerConfig config, FlightCommands& session);

  // Session state errors are swallowed here (the frame is still counted and
  // the decided action recorded); anything else propagates.
  TrackResult on_frame(const vision::Frame& frame);

  TrackResult last() const;
  const TrackerConfig& config() const noexcept { return config_; }

 private:
  const vision::Detector& detector_;
  TrackerConfig config_;
  FlightCommands& session_;
  mutable std::mutex mu_;
  TrackResult last_;
};

// Tracking that can be switched on and off while frames keep flowing. When
// off, frames are still analysed so the current box and action can be shown,
// but no command is issued. Switching off issues one hover().
class VisionLoop {
 public:
  VisionLoop(std::unique_ptr<vision::Detector> detector, TrackerConfig config, FlightCommands& session);

  void set_tracking(bool enabled);
  bool tracking() const noexcept { return tracking_.load(); }

  TrackResult on_frame(const vision::Frame& frame);
  TrackResult last() const;

 private:
  std::unique_ptr<vision::Detector> detector_;
  FlightCommands& session_;
  TrackingController controller_;
  std::atomic<bool> tracking_{false};
  mutable std::mutex mu_;
  TrackResult last_;
};

}  // namespace aerovis::control

#endif  // AEROVIS_CONTROL_TRACKER_HPP_
