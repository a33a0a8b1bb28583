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

// Deterministic drone model. Everything here runs on a virtual clock; the
// networked Simulator drives the same code from a real-time loop.

#ifndef AEROVIS_SIM_SIM_CORE_HPP_
#define AEROVIS_SIM_SIM_CORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aerovis/flight.hpp"
#include "aerovis/protocol/at_command.hpp"
#include "aerovis/protocol/bytes.hpp"
#include "aerovis/protocol/navdata.hpp"
#include "aerovis/vision/frame.hpp"

namespace aerovis::sim {

// Pinhole focal constant in frame-relative units.
inline constexpr double kFocal = 1.0;
// Targets closer than this along the optical axis are not visible.
inline constexpr double kMinVisibleDistance = 0.5;
// Reported pitch/roll at full stick deflection.
inline constexpr double kMaxTiltDeg = 12.0;
inline constexpr double kEmergencyFallRate = 2.0;  // m/s

struct SimConfig {
  int frame_width = 640;
  int frame_height = 360;
  double video_fps = 10.0;
  double navdata_hz = 30.0;
  double physics_dt = 1.0 / 30.0;
  double v_max = 2.0;          // m/s horizontal at full stick
  double vz_max = 1.0;         // m/s vertical at full stick
  double yaw_rate_max = 100.0; // deg/s
  double battery_drain = 0.1;  // %/s while airborne
  double link_range = 50.0;    // m from the origin
  double hover_altitude = 1.0; // m, where takeoff ends
  double watchdog_timeout = 2.0;
  double initial_battery = 100.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on non-positive rates or dimensions.
  void validate() const;
};

struct SimScene {
  double tx = 11.591109915468818;  // 12 m at a bearing of +15 degrees
  double ty = 3.1058285412302493;
  double tz = 0.85;                // target center height
  double target_height = 1.7;
  vision::Rgb target_color{220, 40, 40};
  vision::Rgb background{70, 110, 150};

  void validate() const;
};

// Flat key=value scene file. Keys: target_x, target_y, target_z,
// target_distance + target_bearing_deg (alternative to target_x/target_y),
// target_height, target_color, background_color (as "r,g,b"), frame_width,
// frame_height, video_fps. '#' starts a comment.
void load_scene_file(const std::filesystem::path& path, SimScene& scene, SimConfig& config);
void parse_scene_text(const std::string& text, SimScene& scene, SimConfig& config);

struct SimDrone {
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;
  double yaw_deg = 0.0;
  protocol::PcmdArgs sticks;
  FlightState state = FlightState::kLanded;
  double battery = 100.0;
  double watchdog_timer = 0.0;
  bool watchdog_tripped = false;
  std::uint32_t last_seq = 0;
  bool last_ref_emergency = false;
  double pitch_bias_deg = 0.0;
  double roll_bias_deg = 0.0;
  // Body-frame velocity from the last step, m/s.
  double v_forward = 0.0;
  double v_lateral = 0.0;
  double v_vertical = 0.0;

  bool airborne() const noexcept {
    return state == FlightState::kTakingOff || state == FlightState::kFlying ||
           state == FlightState::kHovering || state == FlightState::kLanding;
  }
};

// Projects the target into the drone camera. With forward distance
//   d_f =  cos(yaw)(tx-px) + sin(yaw)(ty-py)
// lateral d_l = -sin(yaw)(tx-px) + cos(yaw)(ty-py) and vertical d_v = tz-pz:
//   x = 0.5 + f d_l / d_f,  y = 0.5 - f d_v / d_f,
//   h = min(1, f H / d_f),  w = 0.4 h.
// nullopt when d_f <= 0.5 m or the center leaves [0, 1]^2.
std::optional<vision::NormalizedBox> project_target(const SimDrone& drone, const SimScene& scene);

// Background fill plus the target rectangle at its projected box.
vision::Frame render_frame(const SimDrone& drone, const SimScene& scene, const SimConfig& config);

// Pixel rectangle [col0, col1) x [row0, row1) used for a normalized box,
// before clipping.
struct PixelRect {
  int col0, row0, col1, row1;
};
PixelRect box_to_pixels(const vision::NormalizedBox& box, int width, int height);

class SimCore {
 public:
  SimCore(SimConfig config, SimScene scene);

  // REF drives the flight state machine (takeoff level-triggered, emergency
  // on the rising edge of its bit), PCMD stores sticks, FTRIM zeroes the
  // attitude bias on the ground, COMWDG clears a tripped watchdog. Every
  // accepted command resets the watchdog timer. A seq at or below the last
  // accepted one is dropped, except seq 1 which starts a new session.
  // Returns false for dropped commands.
  bool apply_command(const protocol::AtCommand& cmd);

  void step(double dt);
  void step() { step(config_.physics_dt); }

  std::uint32_t state_mask() const noexcept;
  protocol::NavdataPacket navdata_packet() const;
  // Builds the next navdata datagram and advances the navdata sequence.
  Bytes emit_navdata();
  vision::Frame render() const { return render_frame(drone_, scene_, config_); }
  std::optional<vision::NormalizedBox> target_box() const { return project_target(drone_, scene_); }
  bool link_in_range() const noexcept;

  const SimDrone& drone() const noexcept { return drone_; }
  SimDrone& drone() noexcept { return drone_; }
  const SimConfig& config() const noexcept { return config_; }
  const SimScene& scene() const noexcept { return scene_; }
  double time() const noexcept { return time_; }
  const std::map<std::string, std::string>& settings() const noexcept { return settings_; }

 private:
  void on_ref(const protocol::RefBits& bits);

  SimConfig config_;
  SimScene scene_;
  SimDrone drone_;
  std::map<std::string, std::string> settings_;
  std::uint32_t navdata_seq_ = 0;
  double time_ = 0.0;
};

// True when an event at `rate` Hz falls inside physics tick `tick`.
bool tick_due(std::uint64_t tick, double dt, double rate);

// Virtual-clock replay: commands are applied at the start of their tick,
// then the model steps once per tick, emits navdata when due and renders a
// frame when due. `trace` must be sorted by tick.
struct TimedCommand {
  std::uint64_t tick = 0;
  protocol::AtCommand command;
};

struct TraceResult {
  std::vector<Bytes> navdata;
  std::vector<std::uint64_t> frame_digests;  // FNV-1a of each rendered frame
  SimDrone final_state;
};

TraceResult run_trace(const SimConfig& config, const SimScene& scene,
                      std::span<const TimedCommand> trace, std::uint64_t ticks);

}  // namespace aerovis::sim

#endif  // AEROVIS_SIM_SIM_CORE_HPP_
