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

#include <cmath>
#include <random>

#include "aerovis/net/socket.hpp"
#include "aerovis/protocol/navdata.hpp"
#include "aerovis/sim/sim_core.hpp"
#include "aerovis/sim/simulator.hpp"
#include "aerovis/vision/blob_detector.hpp"
#include "harness.hpp"

namespace aerovis::sim {
namespace {

using protocol::AtCommand;
using protocol::PcmdArgs;
using protocol::RefBits;
namespace bits = protocol::state_bits;

SimCore flying_core(SimConfig cfg = {}) {
  SimCore core(cfg, {});
  std::uint32_t seq = 1;
  core.apply_command(AtCommand::ref(seq++, {true, false}));
  for (int i = 0; i < 60 && core.drone().state != FlightState::kHovering; ++i) {
    core.apply_command(AtCommand::comwdg(seq++));
    core.step();
  }
  return core;
}

TEST(SimCore, TakeoffClimbsToHoverAltitude) {
  auto core = flying_core();
  EXPECT_EQ(core.drone().state, FlightState::kHovering);
  EXPECT_DOUBLE_EQ(core.drone().pz, 1.0);
  EXPECT_TRUE(core.state_mask() & bits::kFlying);
}

TEST(SimCore, ForwardPitchIntegratesByHand) {
  auto core = flying_core();
  const double x0 = core.drone().px;
  core.apply_command(AtCommand::pcmd(100, {true, 0.0f, -0.5f, 0.0f, 0.0f}));
  core.step(1.0);
  // v = 0.5 * 2 m/s for one second.
  EXPECT_NEAR(core.drone().px - x0, 1.0, 1e-12);
  EXPECT_NEAR(core.drone().py, 0.0, 1e-12);
}

TEST(SimCore, ZeroSticksHoldPosition) {
  auto core = flying_core();
  const auto before = core.drone();
  core.apply_command(AtCommand::pcmd(100, {false, 0.5f, 0.5f, 0.5f, 0.5f}));
  for (int i = 0; i < 30; ++i) core.step();
  EXPECT_EQ(core.drone().px, before.px);
  EXPECT_EQ(core.drone().py, before.py);
  EXPECT_EQ(core.drone().pz, before.pz);
}

TEST(SimCore, PcmdWhileLandedDoesNotMove) {
  SimCore core({}, {});
  core.apply_command(AtCommand::pcmd(1, {true, 1.0f, -1.0f, 1.0f, 0.0f}));
  for (int i = 0; i < 30; ++i) core.step();
  EXPECT_EQ(core.drone().px, 0.0);
  EXPECT_EQ(core.drone().pz, 0.0);
  EXPECT_EQ(core.drone().state, FlightState::kLanded);
}

TEST(SimCore, StaleSeqDroppedAndSeqOneRestarts) {
  SimCore core({}, {});
  EXPECT_TRUE(core.apply_command(AtCommand::comwdg(5)));
  EXPECT_FALSE(core.apply_command(AtCommand::comwdg(5)));
  EXPECT_FALSE(core.apply_command(AtCommand::comwdg(3)));
  EXPECT_TRUE(core.apply_command(AtCommand::comwdg(1)));
  EXPECT_TRUE(core.apply_command(AtCommand::comwdg(2)));
}

TEST(SimCore, EmergencyDropsToGround) {
  auto core = flying_core();
  core.apply_command(AtCommand::ref(100, {false, true}));
  EXPECT_EQ(core.drone().state, FlightState::kEmergency);
  EXPECT_TRUE(core.state_mask() & bits::kEmergency);
  for (int i = 0; i < 60; ++i) core.step();
  EXPECT_EQ(core.drone().pz, 0.0);
  // Held bit is not a new edge; a fresh edge after release resets.
  core.apply_command(AtCommand::ref(101, {false, true}));
  EXPECT_EQ(core.drone().state, FlightState::kEmergency);
  core.apply_command(AtCommand::ref(102, {false, false}));
  core.apply_command(AtCommand::ref(103, {false, true}));
  EXPECT_EQ(core.drone().state, FlightState::kLanded);
}

TEST(SimCore, LandingReachesGround) {
  auto core = flying_core();
  core.apply_command(AtCommand::ref(100, {}));
  EXPECT_EQ(core.drone().state, FlightState::kLanding);
  for (int i = 0; i < 60; ++i) core.step();
  EXPECT_EQ(core.drone().state, FlightState::kLanded);
  EXPECT_EQ(core.drone().pz, 0.0);
}

TEST(SimCore, WatchdogTripsAfterSilenceAndClearsOnComwdg) {
  SimCore core({}, {});
  core.apply_command(AtCommand::comwdg(1));
  for (int i = 0; i < 60; ++i) core.step();  // 2.0 s
  EXPECT_FALSE(core.state_mask() & bits::kWatchdog);
  for (int i = 0; i < 15; ++i) core.step();  // 2.5 s
  EXPECT_TRUE(core.state_mask() & bits::kWatchdog);
  core.apply_command(AtCommand::ref(2, {}));
  EXPECT_TRUE(core.state_mask() & bits::kWatchdog);
  core.apply_command(AtCommand::comwdg(3));
  EXPECT_FALSE(core.state_mask() & bits::kWatchdog);
}

TEST(SimCore, WatchdogFreezesMotion) {
  auto core = flying_core();
  core.apply_command(AtCommand::pcmd(100, {true, 0.5f, 0.0f, 0.0f, 0.0f}));
  for (int i = 0; i < 90; ++i) core.step();
  const double y = core.drone().py;
  for (int i = 0; i < 30; ++i) core.step();
  EXPECT_EQ(core.drone().py, y);
}

TEST(SimCore, BatteryLowBit) {
  SimConfig cfg;
  cfg.initial_battery = 15.0;
  SimCore core(cfg, {});
  EXPECT_TRUE(core.state_mask() & bits::kBatteryLow);
  EXPECT_FALSE(core.state_mask() & bits::kFlying);
}

TEST(SimCore, NavdataPassesParser) {
  auto core = flying_core();
  const auto p = protocol::parse_navdata(core.emit_navdata());
  const auto demo = protocol::find_demo(p);
  ASSERT_TRUE(demo);
  EXPECT_EQ(demo->altitude_mm, 1000);
  EXPECT_EQ(demo->ctrl_state, to_ctrl_state(FlightState::kHovering));
  const auto q = protocol::parse_navdata(core.emit_navdata());
  EXPECT_EQ(q.seq, p.seq + 1);
}

TEST(SimCore, FtrimClearsBiasOnGround) {
  SimConfig cfg;
  cfg.seed = 42;
  SimCore core(cfg, {});
  EXPECT_NE(core.drone().pitch_bias_deg, 0.0);
  core.apply_command(AtCommand::ftrim(1));
  EXPECT_EQ(core.drone().pitch_bias_deg, 0.0);
  EXPECT_EQ(core.drone().roll_bias_deg, 0.0);
}

TEST(SimCore, InvariantsUnderRandomCommands) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> stick(-1.0f, 1.0f);
  SimConfig cfg;
  cfg.battery_drain = 5.0;
  SimCore core(cfg, {});
  std::uint32_t seq = 1;
  for (int i = 0; i < 5000; ++i) {
    switch (rng() % 6) {
      case 0: core.apply_command(AtCommand::ref(seq++, {rng() % 2 == 0, rng() % 8 == 0})); break;
      case 1:
      case 2: core.apply_command(AtCommand::pcmd(seq++, {true, stick(rng), stick(rng), stick(rng), stick(rng)})); break;
      case 3: core.apply_command(AtCommand::comwdg(seq++)); break;
      default: break;
    }
    const double battery = core.drone().battery;
    const bool airborne = core.drone().airborne();
    core.step();
    ASSERT_GE(core.drone().pz, 0.0);
    ASSERT_GE(core.drone().battery, 0.0);
    ASSERT_LE(core.drone().battery, 100.0);
    if (airborne) {
      ASSERT_LE(core.drone().battery, battery);
    }
    if (core.drone().state == FlightState::kEmergency) {
      ASSERT_EQ(core.drone().sticks, PcmdArgs{});
    }
    if (core.drone().state == FlightState::kEmergency || core.drone().watchdog_tripped) {
      ASSERT_EQ(core.drone().v_forward, 0.0);
      ASSERT_EQ(core.drone().v_lateral, 0.0);
    }
  }
}

TEST(SimCore, LinkLossBeyondRange) {
  auto core = flying_core();
  core.drone().px = 49.0;
  EXPECT_TRUE(core.link_in_range());
  core.drone().px = 51.0;
  EXPECT_FALSE(core.link_in_range());
}

// --- projection and rendering -----------------------------------------------

TEST(Projection, Examples) {
  SimDrone d;
  SimScene s;
  s.tx = 3.4;
  s.ty = 0.0;
  s.tz = 0.0;
  auto box = project_target(d, s);
  ASSERT_TRUE(box);
  EXPECT_DOUBLE_EQ(box->x, 0.5);
  EXPECT_DOUBLE_EQ(box->y, 0.5);
  EXPECT_DOUBLE_EQ(box->h, 0.5);
  EXPECT_DOUBLE_EQ(box->w, 0.2);

  s.tx = 12.0;
  box = project_target(d, s);
  EXPECT_NEAR(box->h, 0.1417, 5e-5);

  s.tx = 0.5;
  EXPECT_FALSE(project_target(d, s));
  s.tx = -5.0;
  EXPECT_FALSE(project_target(d, s));
}

TEST(Projection, DefaultSceneIsTwelveMetresAtFifteenDegrees) {
  SimScene s;
  EXPECT_NEAR(std::hypot(s.tx, s.ty), 12.0, 1e-12);
  EXPECT_NEAR(std::atan2(s.ty, s.tx) * 180.0 / M_PI, 15.0, 1e-12);
}

TEST(Projection, ScaleFree) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    SimDrone d;
    d.px = u(rng);
    d.py = u(rng);
    d.pz = std::abs(u(rng));
    d.yaw_deg = u(rng) * 60.0;
    SimScene s;
    s.tx = d.px + 4.0 * std::cos(d.yaw_deg * M_PI / 180.0) + 0.3 * u(rng);
    s.ty = d.py + 4.0 * std::sin(d.yaw_deg * M_PI / 180.0) + 0.3 * u(rng);
    s.tz = d.pz + 0.3 * u(rng);
    s.target_height = 1.0;
    const auto a = project_target(d, s);
    SimScene s2 = s;
    s2.tx = d.px + 2 * (s.tx - d.px);
    s2.ty = d.py + 2 * (s.ty - d.py);
    s2.tz = d.pz + 2 * (s.tz - d.pz);
    s2.target_height = 2.0;
    const auto b = project_target(d, s2);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a) continue;
    EXPECT_NEAR(a->x, b->x, 1e-12);
    EXPECT_NEAR(a->y, b->y, 1e-12);
    EXPECT_NEAR(a->h, b->h, 1e-12);
  }
}

TEST(Render, RectangleMatchesProjectionWithinOnePixel) {
  SimConfig cfg;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    SimDrone d;
    d.px = 4 * u(rng);
    d.py = 2 * u(rng);
    d.pz = 1 + u(rng) * 0.5;
    const SimScene s;
    const auto box = project_target(d, s);
    const auto frame = render_frame(d, s, cfg);
    if (!box) {
      EXPECT_EQ(frame, vision::Frame::filled(cfg.frame_width, cfg.frame_height, s.background));
      continue;
    }
    // Enumerate target pixels directly.
    int c0 = cfg.frame_width, c1 = -1, r0 = cfg.frame_height, r1 = -1;
    for (int r = 0; r < frame.height; ++r) {
      for (int c = 0; c < frame.width; ++c) {
        if (frame.at(c, r) == s.target_color) {
          c0 = std::min(c0, c);
          c1 = std::max(c1, c + 1);
          r0 = std::min(r0, r);
          r1 = std::max(r1, r + 1);
        }
      }
    }
    ASSERT_GE(c1, 0);
    const double W = cfg.frame_width, H = cfg.frame_height;
    EXPECT_LE(std::abs(c0 - std::max(0.0, (box->x - box->w / 2) * W)), 1.0);
    EXPECT_LE(std::abs(c1 - std::min(W, (box->x + box->w / 2) * W)), 1.0);
    EXPECT_LE(std::abs(r0 - std::max(0.0, (box->y - box->h / 2) * H)), 1.0);
    EXPECT_LE(std::abs(r1 - std::min(H, (box->y + box->h / 2) * H)), 1.0);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Render, DetectorRecoversProjectedBox) {
  SimCore core({}, {});
  core.drone().pz = 1.0;
  const auto truth = core.target_box();
  ASSERT_TRUE(truth);
  const auto det = vision::BlobDetector{}.detect(core.render());
  ASSERT_EQ(det.size(), 1u);
  EXPECT_NEAR(det[0].box.x, truth->x, 1.0 / 640);
  EXPECT_NEAR(det[0].box.y, truth->y, 1.0 / 360);
  EXPECT_NEAR(det[0].box.h, truth->h, 2.0 / 360);
}

TEST(SceneFile, ParsesKeys) {
  SimScene s;
  SimConfig c;
  parse_scene_text("# scene\ntarget_distance = 6\ntarget_bearing_deg=0\ntarget_color=10,20,30\nframe_width=320\n",
                   s, c);
  EXPECT_NEAR(s.tx, 6.0, 1e-12);
  EXPECT_NEAR(s.ty, 0.0, 1e-12);
  EXPECT_EQ(s.target_color, (vision::Rgb{10, 20, 30}));
  EXPECT_EQ(c.frame_width, 320);
  EXPECT_THROW(parse_scene_text("bogus=1\n", s, c), std::invalid_argument);
}

// --- replay -----------------------------------------------------------------

std::vector<TimedCommand> sample_trace() {
  std::vector<TimedCommand> t;
  std::uint32_t seq = 1;
  t.push_back({0, AtCommand::config(seq++, "general:navdata_demo", "TRUE")});
  t.push_back({2, AtCommand::ref(seq++, {true, false})});
  for (std::uint64_t tick = 3; tick < 400; tick += 1) {
    if (tick >= 60 && tick < 120) t.push_back({tick, AtCommand::pcmd(seq++, {true, 0.2f, -0.1f, 0.0f, 0.1f})});
    else t.push_back({tick, AtCommand::comwdg(seq++)});
  }
  t.push_back({300, AtCommand::ref(seq++, {})});
  std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return t;
}

TEST(Replay, SameSeedSameTraceIsByteEqual) {
  SimConfig cfg;
  cfg.seed = 99;
  const auto trace = sample_trace();
  const auto a = run_trace(cfg, {}, trace, 420);
  const auto b = run_trace(cfg, {}, trace, 420);
  ASSERT_EQ(a.navdata.size(), 420u);
  EXPECT_EQ(a.navdata, b.navdata);
  EXPECT_EQ(a.frame_digests, b.frame_digests);
  EXPECT_EQ(a.frame_digests.size(), 140u);

  cfg.seed = 100;
  EXPECT_NE(run_trace(cfg, {}, trace, 420).navdata, a.navdata);
}

TEST(TickDue, Rates) {
  int nav = 0, video = 0;
  for (std::uint64_t t = 0; t < 300; ++t) {
    nav += tick_due(t, 1.0 / 30, 30.0);
    video += tick_due(t, 1.0 / 30, 10.0);
  }
  EXPECT_EQ(nav, 300);
  EXPECT_EQ(video, 100);
}

// --- networked --------------------------------------------------------------

TEST(Simulator, StartStopRepeatedly) {
  for (int i = 0; i < 100; ++i) {
    auto s = aerovis::testing::start_sim();
    EXPECT_TRUE(s->running());
    s->stop();
    EXPECT_FALSE(s->running());
  }
}

TEST(Simulator, PortInUseIsAStartupError) {
  auto a = aerovis::testing::start_sim();
  EXPECT_THROW(Simulator({}, {}, a->ports()), SimStartupError);
  auto b = aerovis::testing::start_sim();
  EXPECT_NE(a->ports().command, b->ports().command);
}

TEST(Simulator, NavdataFlowsOnlyAfterTrigger) {
  auto s = aerovis::testing::start_sim();
  auto sock = net::UdpSocket::bind(0, "127.0.0.1");
  const auto to = net::Address::resolve("127.0.0.1", s->ports().navdata);
  EXPECT_FALSE(sock.receive(std::chrono::milliseconds(200)));
  sock.send_to(to, ByteView(protocol::kNavdataTrigger, 4));
  const auto got = sock.receive(std::chrono::milliseconds(500));
  ASSERT_TRUE(got);
  EXPECT_NO_THROW(protocol::parse_navdata(got->data));
}

TEST(Simulator, ParsesCommandDatagrams) {
  auto s = aerovis::testing::start_sim();
  auto sock = net::UdpSocket::bind(0, "127.0.0.1");
  const std::string dgram = protocol::encode_at(AtCommand::ref(1, {true, false})) +
                            protocol::encode_at(AtCommand::comwdg(2)) + "garbage\r";
  sock.send_to(net::Address::resolve("127.0.0.1", s->ports().command),
               ByteView(reinterpret_cast<const std::uint8_t*>(dgram.data()), dgram.size()));
  ASSERT_TRUE(aerovis::testing::wait_until([&] { return s->captured_commands().size() == 2; },
                                            std::chrono::milliseconds(1000)));
  EXPECT_TRUE(aerovis::testing::wait_until([&] { return s->drone().pz > 0.0; }, std::chrono::milliseconds(1000)));
}

}  // namespace
}  // namespace aerovis::sim
