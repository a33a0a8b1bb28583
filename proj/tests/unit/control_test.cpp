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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "aerovis/control/tracker.hpp"
#include "aerovis/vision/blob_detector.hpp"
#include "harness.hpp"
#include "oracles.hpp"

namespace aerovis::control {
namespace {

using aerovis::testing::RecordingSession;
using aerovis::testing::reference_take_action;

std::string act(double x, double y, double h, bool corrected = false) {
  TrackerConfig cfg;
  cfg.corrected_height_rule = corrected;
  return std::string(to_string(take_action({x, y, 0.3, h}, cfg)));
}

TEST(TakeAction, Examples) {
  EXPECT_EQ(act(0.5, 0.5, 0.5), "hover");
  EXPECT_EQ(act(0.65, 0.5, 0.5), "right");
  EXPECT_EQ(act(0.35, 0.5, 0.5), "left");
  EXPECT_EQ(act(0.5, 0.85, 0.5), "down");
  EXPECT_EQ(act(0.5, 0.15, 0.5), "up");
  EXPECT_EQ(act(0.5, 0.5, 0.95), "forward");
  EXPECT_EQ(act(0.60, 0.5, 0.5), "hover");
  EXPECT_EQ(act(0.65, 0.85, 0.5), "right");
  EXPECT_EQ(act(0.5, 0.5, 0.95, true), "backward");
}

TEST(TakeAction, GridMatchesTranscription) {
  for (bool corrected : {false, true}) {
    int mismatches = 0;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        for (int k = 0; k <= 150; ++k) {
          const double x = i / 100.0, y = j / 100.0, h = k / 100.0;
          if (act(x, y, h, corrected) != reference_take_action(x, y, h, corrected)) ++mismatches;
        }
      }
    }
    EXPECT_EQ(mismatches, 0) << "corrected=" << corrected;
  }
}

TEST(TakeAction, IndependentOfWidth) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int i = 0; i < 5000; ++i) {
    const double x = u(rng) / 1.5, y = u(rng) / 1.5, h = u(rng);
    const auto base = take_action({x, y, 0.0, h});
    for (double w : {0.01, 0.3, 1.0, 7.0}) ASSERT_EQ(take_action({x, y, w, h}), base);
  }
}

TEST(TakeAction, HoverIffBand) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = u(rng), y = u(rng), h = u(rng);
    const bool band = std::abs(x - 0.5) <= 0.1 && std::abs(y - 0.5) <= 0.3 && std::abs(h - 0.5) <= 0.3;
    ASSERT_EQ(take_action({x, y, 0.1, h}) == TrackAction::kHover, band);
  }
}

TEST(TakeAction, BackwardUnreachableForNormalizedHeightsByDefault) {
  for (int k = 0; k <= 100; ++k) EXPECT_NE(take_action({0.5, 0.5, 0.2, k / 100.0}), TrackAction::kBackward);
}

TEST(TrackerConfig, Validate) {
  TrackerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps_vertical = 0.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ActionNames, RoundTrip) {
  std::set<std::string_view> names;
  for (auto a : kAllTrackActions) {
    names.insert(to_string(a));
    EXPECT_EQ(track_action_from_string(to_string(a)), a);
  }
  EXPECT_EQ(names.size(), 7u);
  EXPECT_FALSE(track_action_from_string("sideways"));
}

TEST(TrackStep, IssuesMatchingCommands) {
  RecordingSession s;
  TrackerConfig cfg;
  EXPECT_EQ(track_step({}, cfg, s), TrackAction::kHover);
  const std::vector<vision::Detection> right{{{0.7, 0.5, 0.2, 0.5}, 0, 1.0}};
  EXPECT_EQ(track_step(right, cfg, s), TrackAction::kRight);
  const std::vector<vision::Detection> other_class{{{0.7, 0.5, 0.2, 0.5}, 3, 1.0}};
  EXPECT_EQ(track_step(other_class, cfg, s), TrackAction::kHover);
  cfg.hover_on_no_detection = false;
  EXPECT_EQ(track_step({}, cfg, s), TrackAction::kHover);

  const auto calls = s.calls();
  ASSERT_EQ(calls.size(), 3u);
  EXPECT_EQ(calls[0].op, "hover");
  EXPECT_EQ(calls[1].op, "move");
  EXPECT_EQ(calls[1].direction, MoveDirection::kRight);
  EXPECT_DOUBLE_EQ(calls[1].speed, 0.2);
  EXPECT_EQ(calls[2].op, "hover");
}

TEST(GestureToCommand, FixedTable) {
  RecordingSession s;
  for (int l = 0; l < 6; ++l) gesture_to_command(*vision::gesture_from_label(l), s);
  const auto c = s.calls();
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c[0].op, "takeoff");
  EXPECT_EQ(c[1].op, "land");
  const MoveDirection dirs[] = {MoveDirection::kRight, MoveDirection::kLeft, MoveDirection::kForward,
                                MoveDirection::kBackward};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(c[2 + i].op, "move");
    EXPECT_EQ(c[2 + i].direction, dirs[i]);
    EXPECT_DOUBLE_EQ(c[2 + i].speed, 0.2);
  }
}

TEST(VisionLoop, AnalysesWithoutCommandingUntilEnabled) {
  RecordingSession s;
  VisionLoop loop(std::make_unique<vision::BlobDetector>(), {}, s);
  vision::Frame f = vision::Frame::filled(100, 100, {70, 110, 150});
  f.fill_rect(80, 40, 90, 60, {220, 40, 40});

  EXPECT_EQ(loop.on_frame(f).action, TrackAction::kRight);
  EXPECT_TRUE(s.calls().empty());

  loop.set_tracking(true);
  EXPECT_EQ(loop.on_frame(f).action, TrackAction::kRight);
  loop.set_tracking(false);
  const auto calls = s.calls();
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[0].op, "move");
  EXPECT_EQ(calls[1].op, "hover");
  EXPECT_EQ(loop.last().frames, 2u);
  ASSERT_TRUE(loop.last().box.has_value());
  EXPECT_DOUBLE_EQ(loop.last().box->x, 0.85);
}

}  // namespace
}  // namespace aerovis::control
