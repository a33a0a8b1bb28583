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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion numbers as arguments
// to run a subset.

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "aerovis/client/drone_client.hpp"
#include "aerovis/control/tracker.hpp"
#include "aerovis/net/socket.hpp"
#include "aerovis/protocol/at_command.hpp"
#include "aerovis/protocol/error.hpp"
#include "aerovis/protocol/navdata.hpp"
#include "aerovis/sim/sim_core.hpp"
#include "aerovis/sim/simulator.hpp"
#include "aerovis/vision/blob_detector.hpp"
#include "aerovis/vision/gesture_mlp.hpp"
#include "aerovis/vision/gesture_training.hpp"
#include "harness.hpp"
#include "oracles.hpp"

namespace {

using namespace aerovis;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome take_action_grid() {
  const auto t0 = Clock::now();
  long points = 0, mismatches = 0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      for (int k = 0; k <= 150; ++k) {
        const double x = i / 100.0, y = j / 100.0, h = k / 100.0;
        const auto got = control::to_string(control::take_action({x, y, 0.25, h}));
        if (got != testing::reference_take_action(x, y, h)) ++mismatches;
        ++points;
      }
    }
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 1.0,
          fmt("%ld mismatches over %ld grid points in %.3f s (limit 1 s)", mismatches, points, dt)};
}

// 2 ---------------------------------------------------------------------------

protocol::AtCommand random_at(std::mt19937_64& rng, std::uint32_t seq) {
  using protocol::AtCommand;
  std::uniform_real_distribution<float> stick(-1.0f, 1.0f);
  switch (rng() % 6) {
    case 0: return AtCommand::ref(seq, {rng() % 2 == 0, rng() % 2 == 0});
    case 1: return AtCommand::pcmd(seq, {rng() % 2 == 0, stick(rng), stick(rng), stick(rng), stick(rng)});
    case 2: return AtCommand::ftrim(seq);
    case 3: return AtCommand::config(seq, "key:" + std::to_string(rng() % 1000), "v," + std::to_string(rng()));
    case 4: return AtCommand::comwdg(seq);
    default: return AtCommand::ctrl(seq);
  }
}

protocol::NavdataPacket random_navdata(std::mt19937_64& rng) {
  protocol::NavdataPacket p;
  p.state_mask = static_cast<std::uint32_t>(rng());
  p.seq = static_cast<std::uint32_t>(rng());
  p.vision_flag = static_cast<std::uint32_t>(rng() % 2);
  protocol::DemoData d;
  std::uniform_real_distribution<float> f(-1e5f, 1e5f);
  d.ctrl_state = static_cast<std::uint32_t>(rng() % 7) << 16;
  d.battery_percent = static_cast<std::uint32_t>(rng() % 101);
  d.pitch_mdeg = f(rng);
  d.roll_mdeg = f(rng);
  d.yaw_mdeg = f(rng);
  d.altitude_mm = static_cast<std::int32_t>(rng() % 100000);
  d.vx_mm_s = f(rng);
  d.vy_mm_s = f(rng);
  d.vz_mm_s = f(rng);
  p.options.push_back(d.to_option());
  if (rng() % 3 == 0) {
    protocol::NavOption extra;
    extra.tag = static_cast<std::uint16_t>(1 + rng() % 100);
    extra.payload.resize(rng() % 32);
    for (auto& b : extra.payload) b = static_cast<std::uint8_t>(rng());
    p.options.push_back(extra);
  }
  return p;
}

Outcome protocol_round_trips() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  int at_fail = 0, nav_fail = 0, float_fail = 0;

  for (int i = 0; i < 10000; ++i) {
    const auto cmd = random_at(rng, static_cast<std::uint32_t>(1 + rng() % 0xFFFFFFFEu));
    try {
      if (!(protocol::parse_at(protocol::encode_at(cmd)) == cmd)) ++at_fail;
    } catch (const protocol::ProtocolError&) {
      ++at_fail;
    }
    const auto pkt = random_navdata(rng);
    try {
      if (!(protocol::parse_navdata(protocol::build_navdata(pkt)) == pkt)) ++nav_fail;
    } catch (const protocol::ProtocolError&) {
      ++nav_fail;
    }
  }

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = unit(rng);
    if (protocol::encode_float_arg(v) != testing::as_signed(testing::binary32_bits(v))) ++float_fail;
  }
  if (protocol::encode_float_arg(-0.8) != testing::kMinusPointEightArg) ++float_fail;

  // Exhaustive single-byte corruption of one packet, three flip patterns per
  // byte. Everything after the header constant is covered by the checksum.
  const Bytes good = protocol::build_navdata(random_navdata(rng));
  int undetected = 0, corruptions = 0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    for (int mask : {0x01, 0x80, 0xFF}) {
      Bytes bad = good;
      bad[i] = static_cast<std::uint8_t>(bad[i] ^ mask);
      ++corruptions;
      try {
        protocol::parse_navdata(bad);
        ++undetected;
      } catch (const protocol::ProtocolError& e) {
        const auto want = i < 4 ? protocol::ErrorCode::kNotNavdata : protocol::ErrorCode::kIntegrity;
        if (e.code() != want) ++undetected;
      }
    }
  }

  const double dt = seconds_since(t0);
  const bool pass = at_fail == 0 && nav_fail == 0 && float_fail == 0 && undetected == 0 && dt < 10.0;
  return {pass, fmt("AT %d/10000 failed, navdata %d/10000 failed, float oracle %d mismatches, "
                    "%d/%d corruptions undetected, %.2f s (limit 10 s)",
                    at_fail, nav_fail, float_fail, undetected, corruptions, dt)};
}

// 3 ---------------------------------------------------------------------------

Outcome ref_constants() {
  using protocol::RefBits;
  const auto takeoff = RefBits{true, false}.value();
  const auto land = RefBits{false, false}.value();
  const auto emergency = RefBits{false, true}.value();
  const bool lines = protocol::encode_at(protocol::AtCommand::ref(1, {true, false})) == "AT*REF=1,290718208\r" &&
                     protocol::encode_at(protocol::AtCommand::ref(3, {})) == "AT*REF=3,290717696\r";
  return {takeoff == testing::kRefTakeoff && land == testing::kRefLand && emergency == testing::kRefEmergency && lines,
          fmt("takeoff %u, land %u, emergency %u (expected 290718208, 290717696, 290717952)", takeoff, land,
              emergency)};
}

// 4 ---------------------------------------------------------------------------

Outcome gesture_network() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  constexpr double eps = 1e-5;
  double worst = 0.0;
  long checked = 0;
  for (int draw = 0; draw < 20; ++draw) {
    auto params = vision::initial_params(rng());
    std::normal_distribution<double> jitter(0.0, 0.1);
    for (auto t : params.tensors()) {
      for (auto& v : t) v += jitter(rng);
    }
    std::vector<vision::GestureSample> batch(4);
    std::normal_distribution<double> k(0.0, 1.0);
    for (auto& s : batch) {
      for (auto& v : s.keypoints) v = k(rng);
      s.label = static_cast<int>(rng() % vision::kGestureClasses);
    }
    const auto analytic = vision::mlp_loss_and_grad(params, batch);
    const auto grads = analytic.grad.tensors();
    auto tensors = params.tensors();
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t i = 0; i < tensors[t].size(); ++i) {
        const double saved = tensors[t][i];
        tensors[t][i] = saved + eps;
        const double up = vision::mlp_loss(params, batch);
        tensors[t][i] = saved - eps;
        const double down = vision::mlp_loss(params, batch);
        tensors[t][i] = saved;
        const double numeric = (up - down) / (2 * eps);
        const double denom = std::max(std::abs(numeric), std::abs(grads[t][i]));
        if (denom > 1e-10) worst = std::max(worst, std::abs(numeric - grads[t][i]) / denom);
        ++checked;
      }
    }
  }

  const auto data = vision::synth_gesture_dataset(vision::kDefaultGestureDatasetSize, 7);
  vision::TrainConfig cfg;
  cfg.seed = 7;
  const auto a = vision::train_gestures(data, cfg);
  const auto b = vision::train_gestures(data, cfg);
  const bool deterministic = a.params == b.params && a.metrics.loss_curve == b.metrics.loss_curve;
  const double dt = seconds_since(t0);
  const bool pass = worst <= 1e-4 && a.metrics.test_accuracy >= 0.95 && deterministic && dt < 30.0;
  return {pass, fmt("worst relative gradient error %.2e over %ld coordinates x 20 draws (limit 1e-4), "
                    "test accuracy %.4f on %zu samples (limit 0.95), deterministic=%s, %.1f s (limit 30 s)",
                    worst, checked / 20, a.metrics.test_accuracy, data.size(), deterministic ? "yes" : "no", dt)};
}

// 5 ---------------------------------------------------------------------------

// Drives a SimCore directly from the session interface, for the virtual-clock
// replay of the closed loop.
class CoreSession final : public FlightCommands {
 public:
  explicit CoreSession(sim::SimCore& core) : core_(core) {}
  void takeoff() override { core_.apply_command(protocol::AtCommand::ref(++seq_, {true, false})); }
  void land() override { core_.apply_command(protocol::AtCommand::ref(++seq_, {})); }
  void hover() override { core_.apply_command(protocol::AtCommand::pcmd(++seq_, {})); }
  void move(MoveDirection d, double speed) override {
    const auto s = sticks_for(d, static_cast<float>(speed));
    core_.apply_command(protocol::AtCommand::pcmd(++seq_, {true, s.roll, s.pitch, s.gaz, s.yaw}));
  }
  void keepalive() { core_.apply_command(protocol::AtCommand::comwdg(++seq_)); }

 private:
  sim::SimCore& core_;
  std::uint32_t seq_ = 0;
};

std::vector<control::TrackAction> virtual_closed_loop(std::uint64_t seed, int steps) {
  sim::SimConfig cfg;
  cfg.seed = seed;
  sim::SimCore core(cfg, {});
  CoreSession session(core);
  session.takeoff();
  while (core.drone().state != FlightState::kHovering) {
    session.keepalive();
    core.step();
  }
  const vision::BlobDetector detector;
  control::TrackingController controller(detector, {}, session);
  std::vector<control::TrackAction> actions;
  const int ticks_per_frame = static_cast<int>(std::lround(1.0 / (cfg.physics_dt * cfg.video_fps)));
  for (int i = 0; i < steps; ++i) {
    actions.push_back(controller.on_frame(core.render()).action);
    for (int t = 0; t < ticks_per_frame; ++t) core.step();
  }
  return actions;
}

Outcome closed_loop() {
  const auto t0 = Clock::now();
  constexpr int kReachLimit = 300;
  constexpr int kHold = 100;

  auto simulator = testing::start_sim();
  client::DroneClient drone;
  std::mutex mu;
  std::vector<control::TrackAction> actions;
  control::VisionLoop loop(std::make_unique<vision::BlobDetector>(), {}, drone);

  std::string failure;
  if (drone.connect(testing::endpoint_for(*simulator)) != client::LinkStatus::kLinked) failure = "no link";
  if (failure.empty()) {
    drone.takeoff();
    if (!drone.wait_for_state(FlightState::kFlying, 5s)) failure = "takeoff did not complete";
  }
  if (failure.empty()) {
    drone.connect_video([&](const vision::Frame& frame) {
      const bool tracking = loop.tracking();
      const auto r = loop.on_frame(frame);
      if (!tracking) return;
      std::lock_guard lock(mu);
      actions.push_back(r.action);
    });
    loop.set_tracking(true);
    testing::wait_until(
        [&] {
          std::lock_guard lock(mu);
          const auto first = std::find(actions.begin(), actions.end(), control::TrackAction::kHover);
          if (first == actions.end()) return actions.size() >= kReachLimit + kHold;
          return actions.end() - first >= kHold + 1;
        },
        55s, 50ms);
    loop.set_tracking(false);
  }
  drone.disconnect();
  simulator->stop();

  std::vector<control::TrackAction> seen;
  {
    std::lock_guard lock(mu);
    seen = actions;
  }
  const auto first = std::find(seen.begin(), seen.end(), control::TrackAction::kHover);
  const long reach = first == seen.end() ? -1 : first - seen.begin();
  bool held = reach >= 0 && seen.end() - first >= kHold + 1 &&
              std::all_of(first, first + kHold + 1, [](auto a) { return a == control::TrackAction::kHover; });

  // Same scene on the virtual clock, twice, for determinism.
  const auto va = virtual_closed_loop(7, kReachLimit + kHold);
  const auto vb = virtual_closed_loop(7, kReachLimit + kHold);
  const auto vfirst = std::find(va.begin(), va.end(), control::TrackAction::kHover);
  const long vreach = vfirst == va.end() ? -1 : vfirst - va.begin();
  const bool vheld = vreach >= 0 && vreach < kReachLimit &&
                     std::all_of(vfirst, vfirst + kHold + 1, [](auto a) { return a == control::TrackAction::kHover; });
  const bool deterministic = va == vb;

  const double dt = seconds_since(t0);
  const bool pass = failure.empty() && reach >= 0 && reach < kReachLimit && held && vheld && deterministic && dt < 60.0;
  return {pass, fmt("%snetworked: hover at step %ld (limit %d), held %d further steps: %s; virtual clock: hover at "
                    "step %ld, held: %s, deterministic: %s; %.1f s (limit 60 s)",
                    failure.empty() ? "" : (failure + "; ").c_str(), reach, kReachLimit, kHold, held ? "yes" : "no",
                    vreach, vheld ? "yes" : "no", deterministic ? "yes" : "no", dt)};
}

// 6 ---------------------------------------------------------------------------

Outcome throughput() {
  // Synthetic frames from the simulator's renderer at assorted poses.
  sim::SimCore core({}, {});
  std::vector<vision::Frame> frames;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    core.drone().px = 6 + 4 * u(rng);
    core.drone().py = 1.5 * u(rng);
    core.drone().pz = 1 + 0.3 * u(rng);
    frames.push_back(core.render());
  }
  const vision::BlobDetector detector;
  const auto t0 = Clock::now();
  int processed = 0, detected = 0;
  while (processed < 200 || seconds_since(t0) < 1.0) {
    const auto& f = frames[static_cast<std::size_t>(processed) % frames.size()];
    const auto d = detector.detect(f);
    if (!d.empty()) {
      (void)control::take_action(d.front().box);
      ++detected;
    }
    ++processed;
  }
  const double fps = processed / seconds_since(t0);
  return {fps >= 4.5 && detected > 0,
          fmt("%.1f fps on 640x360 frames (floor 4.5 fps, %.0fx headroom), %d/%d frames with a detection", fps,
              fps / 4.5, detected, processed)};
}

// 7 ---------------------------------------------------------------------------

Outcome watchdog() {
  namespace bits = protocol::state_bits;

  // Silence: one keepalive, then nothing.
  auto simulator = testing::start_sim();
  auto sock = net::UdpSocket::bind(0, "127.0.0.1");
  sock.send_to(net::Address::resolve("127.0.0.1", simulator->ports().navdata),
               ByteView(protocol::kNavdataTrigger, 4));
  const std::string wdg = protocol::encode_at(protocol::AtCommand::comwdg(1));
  sock.send_to(net::Address::resolve("127.0.0.1", simulator->ports().command),
               ByteView(reinterpret_cast<const std::uint8_t*>(wdg.data()), wdg.size()));
  const auto silent_from = Clock::now();
  bool early_flag = false, flagged = false;
  while (seconds_since(silent_from) < 3.0) {
    const auto dgram = sock.receive(100ms);
    if (!dgram) continue;
    const auto pkt = protocol::parse_navdata(dgram->data);
    const double t = seconds_since(silent_from);
    if (t < 1.5 && (pkt.state_mask & bits::kWatchdog)) early_flag = true;
    if (t >= 2.5) {
      flagged = (pkt.state_mask & bits::kWatchdog) != 0;
      break;
    }
  }
  simulator->stop();

  // Idle connected client for 30 s.
  auto sim2 = testing::start_sim();
  client::DroneClient drone;
  const bool linked = drone.connect(testing::endpoint_for(*sim2)) == client::LinkStatus::kLinked;
  bool tripped = false;
  long samples = 0;
  const auto idle_from = Clock::now();
  while (seconds_since(idle_from) < 30.0) {
    std::this_thread::sleep_for(50ms);
    tripped = tripped || (drone.telemetry_snapshot().state_mask & bits::kWatchdog) || sim2->drone().watchdog_tripped;
    ++samples;
  }
  drone.disconnect();
  sim2->stop();

  return {flagged && !early_flag && linked && !tripped,
          fmt("silent 2.5 s: watchdog bit %s (set early: %s); idle client 30 s: watchdog %s over %ld samples",
              flagged ? "set" : "NOT set", early_flag ? "yes" : "no", tripped ? "TRIPPED" : "clear", samples)};
}

// 8 ---------------------------------------------------------------------------

Outcome determinism() {
  std::vector<sim::TimedCommand> trace;
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<float> stick(-0.5f, 0.5f);
  std::uint32_t seq = 1;
  trace.push_back({0, protocol::AtCommand::config(seq++, "general:navdata_demo", "TRUE")});
  trace.push_back({1, protocol::AtCommand::ftrim(seq++)});
  trace.push_back({3, protocol::AtCommand::ref(seq++, {true, false})});
  for (std::uint64_t tick = 4; tick < 900; ++tick) {
    if (tick % 10 == 0 && tick > 60 && tick < 700) {
      trace.push_back({tick, protocol::AtCommand::pcmd(seq++, {true, stick(rng), stick(rng), stick(rng), stick(rng)})});
    } else {
      trace.push_back({tick, protocol::AtCommand::comwdg(seq++)});
    }
  }
  trace.push_back({750, protocol::AtCommand::ref(seq++, {})});
  std::stable_sort(trace.begin(), trace.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });

  sim::SimConfig cfg;
  cfg.seed = 1234;
  const auto a = sim::run_trace(cfg, {}, trace, 1000);
  const auto b = sim::run_trace(cfg, {}, trace, 1000);
  std::size_t first_diff = a.navdata.size();
  for (std::size_t i = 0; i < std::min(a.navdata.size(), b.navdata.size()); ++i) {
    if (a.navdata[i] != b.navdata[i]) {
      first_diff = i;
      break;
    }
  }
  const bool equal = a.navdata == b.navdata && a.frame_digests == b.frame_digests;
  std::size_t bytes = 0;
  for (const auto& p : a.navdata) bytes += p.size();
  return {equal && !a.navdata.empty(),
          fmt("%zu navdata packets (%zu bytes) and %zu frames replayed twice: %s", a.navdata.size(), bytes,
              a.frame_digests.size(),
              equal ? "byte-equal" : fmt("first difference at packet %zu", first_diff).c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {1, "take_action decision table", take_action_grid},
      {2, "protocol round-trips", protocol_round_trips},
      {3, "REF constants", ref_constants},
      {4, "gesture network", gesture_network},
      {5, "closed loop", closed_loop},
      {6, "throughput", throughput},
      {7, "watchdog/keepalive", watchdog},
      {8, "determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
