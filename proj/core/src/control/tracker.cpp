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

#include "aerovis/control/tracker.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <stdexcept>

namespace aerovis::control {

namespace {
constexpr double kGestureMoveSpeed = 0.2;
}  // namespace

std::string_view to_string(TrackAction action) noexcept {
  switch (action) {
    case TrackAction::kHover: return "hover";
    case TrackAction::kRight: return "right";
    case TrackAction::kLeft: return "left";
    case TrackAction::kDown: return "down";
    case TrackAction::kUp: return "up";
    case TrackAction::kBackward: return "backward";
    case TrackAction::kForward: return "forward";
  }
  return "?";
}

std::optional<TrackAction> track_action_from_string(std::string_view name) noexcept {
  for (auto a : kAllTrackActions) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::optional<MoveDirection> direction_for(TrackAction action) noexcept {
  switch (action) {
    case TrackAction::kHover: return std::nullopt;
    case TrackAction::kRight: return MoveDirection::kRight;
    case TrackAction::kLeft: return MoveDirection::kLeft;
    case TrackAction::kDown: return MoveDirection::kDown;
    case TrackAction::kUp: return MoveDirection::kUp;
    case TrackAction::kBackward: return MoveDirection::kBackward;
    case TrackAction::kForward: return MoveDirection::kForward;
  }
  return std::nullopt;
}

void TrackerConfig::validate() const {
  for (double eps : {eps_horizontal, eps_vertical, eps_height}) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("tracker eps values must lie in (0, 0.5)");
  }
}

TrackAction take_action(const vision::NormalizedBox& box, const TrackerConfig& cfg) {
  const double x = box.x;
  const double y = box.y;
  const double h = box.h;

  if (std::abs(x - 0.5) <= cfg.eps_horizontal && std::abs(y - 0.5) <= cfg.eps_vertical &&
      std::abs(h - 0.5) <= cfg.eps_height) {
    return TrackAction::kHover;
  }
  if (x >= 0.5 + cfg.eps_horizontal) return TrackAction::kRight;
  if (x <= 0.5 - cfg.eps_horizontal) return TrackAction::kLeft;
  if (y >= 0.5 + cfg.eps_vertical) return TrackAction::kDown;
  if (y <= 0.5 - cfg.eps_vertical) return TrackAction::kUp;
  const double backoff = (cfg.corrected_height_rule ? 0.5 : 1.0) + cfg.eps_height;
  if (h >= backoff) return TrackAction::kBackward;
  return TrackAction::kForward;
}

TrackAction track_step(std::span<const vision::Detection> detections, const TrackerConfig& cfg,
                       FlightCommands& session) {
  const vision::Detection* target = nullptr;
  for (const auto& d : detections) {
    if (d.class_id == cfg.target_class) {
      target = &d;
      break;
    }
  }
  if (target == nullptr) {
    if (cfg.hover_on_no_detection) session.hover();
    return TrackAction::kHover;
  }

  const TrackAction action = take_action(target->box, cfg);
  if (const auto direction = direction_for(action)) {
    session.move(*direction, cfg.move_speed);
  } else {
    session.hover();
  }
  return action;
}

void gesture_to_command(vision::Gesture gesture, FlightCommands& session) {
  switch (gesture) {
    case vision::Gesture::kTakeoff: session.takeoff(); return;
    case vision::Gesture::kLand: session.land(); return;
    case vision::Gesture::kRight: session.move(MoveDirection::kRight, kGestureMoveSpeed); return;
    case vision::Gesture::kLeft: session.move(MoveDirection::kLeft, kGestureMoveSpeed); return;
    case vision::Gesture::kForward: session.move(MoveDirection::kForward, kGestureMoveSpeed); return;
    case vision::Gesture::kBackward: session.move(MoveDirection::kBackward, kGestureMoveSpeed); return;
  }
}

TrackingController::TrackingController(const vision::Detector& detector, TrackerConfig config,
                                       FlightCommands& session)
    : detector_(detector), config_(config), session_(session) {
  config_.validate();
}

TrackResult TrackingController::on_frame(const vision::Frame& frame) {
  const auto detections = detector_.detect(frame);
  TrackResult result;
  for (const auto& d : detections) {
    if (d.class_id == config_.target_class) {
      result.box = d.box;
      break;
    }
  }
  try {
    result.action = track_step(detections, config_, session_);
  } catch (const StateError& e) {
    result.action = result.box ? take_action(*result.box, config_) : TrackAction::kHover;
    spdlog::debug("tracking: command not issued: {}", e.what());
  }
  std::lock_guard lock(mu_);
  result.frames = last_.frames + 1;
  last_ = result;
  return result;
}

TrackResult TrackingController::last() const {
  std::lock_guard lock(mu_);
  return last_;
}

VisionLoop::VisionLoop(std::unique_ptr<vision::Detector> detector, TrackerConfig config,
                       FlightCommands& session)
    : detector_(std::move(detector)), session_(session), controller_(*detector_, config, session) {}

void VisionLoop::set_tracking(bool enabled) {
  const bool was = tracking_.exchange(enabled);
  if (was && !enabled) {
    try {
      session_.hover();
    } catch (const StateError& e) {
      spdlog::debug("tracking: hover on stop skipped: {}", e.what());
    }
  }
}

TrackResult VisionLoop::on_frame(const vision::Frame& frame) {
  TrackResult result;
  if (tracking_.load()) {
    result = controller_.on_frame(frame);
  } else {
    for (const auto& d : detector_->detect(frame)) {
      if (d.class_id == controller_.config().target_class) {
        result.box = d.box;
        result.action = take_action(d.box, controller_.config());
        break;
      }
    }
  }
  std::lock_guard lock(mu_);
  result.frames = last_.frames + 1;
  last_ = result;
  return result;
}

TrackResult VisionLoop::last() const {
  std::lock_guard lock(mu_);
  return last_;
}

}  // namespace aerovis::control
