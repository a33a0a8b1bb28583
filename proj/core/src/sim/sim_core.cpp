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

#include "aerovis/sim/sim_core.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aerovis/protocol/navdata.hpp"

namespace aerovis::sim {
namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

vision::Rgb parse_color(const std::string& value) {
  std::istringstream in(value);
  int r, g, b;
  char c1, c2;
  if (!(in >> r >> c1 >> g >> c2 >> b) || c1 != ',' || c2 != ',' || r < 0 || r > 255 || g < 0 ||
      g > 255 || b < 0 || b > 255) {
    throw std::invalid_argument("bad color '" + value + "', expected r,g,b");
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("scene key '" + key + "': bad number '" + value + "'");
  }
}

}  // namespace

bool tick_due(std::uint64_t tick, double dt, double rate) {
  const auto before = std::floor(static_cast<double>(tick) * dt * rate + 1e-9);
  const auto after = std::floor(static_cast<double>(tick + 1) * dt * rate + 1e-9);
  return after > before;
}

void SimConfig::validate() const {
  if (frame_width <= 0 || frame_height <= 0) throw std::invalid_argument("frame dimensions must be positive");
  if (frame_width > 65535 || frame_height > 65535) throw std::invalid_argument("frame dimensions too large");
  if (!(video_fps > 0) || !(navdata_hz > 0) || !(physics_dt > 0)) {
    throw std::invalid_argument("sim rates must be positive");
  }
  if (!(v_max > 0) || !(vz_max > 0) || !(yaw_rate_max > 0)) {
    throw std::invalid_argument("sim speed limits must be positive");
  }
}

void SimScene::validate() const {
  if (!(target_height > 0)) throw std::invalid_argument("target height must be positive");
  if (target_color == background) throw std::invalid_argument("target and background colors must differ");
}

void parse_scene_text(const std::string& text, SimScene& scene, SimConfig& config) {
  std::istringstream in(text);
  std::string line;
  std::optional<double> distance, bearing;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("scene line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "target_x") scene.tx = parse_number(key, value);
    else if (key == "target_y") scene.ty = parse_number(key, value);
    else if (key == "target_z") scene.tz = parse_number(key, value);
    else if (key == "target_height") scene.target_height = parse_number(key, value);
    else if (key == "target_distance") distance = parse_number(key, value);
    else if (key == "target_bearing_deg") bearing = parse_number(key, value);
    else if (key == "target_color") scene.target_color = parse_color(value);
    else if (key == "background_color") scene.background = parse_color(value);
    else if (key == "frame_width") config.frame_width = static_cast<int>(parse_number(key, value));
    else if (key == "frame_height") config.frame_height = static_cast<int>(parse_number(key, value));
    else if (key == "video_fps") config.video_fps = parse_number(key, value);
    else throw std::invalid_argument("scene line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (distance || bearing) {
    const double d = distance.value_or(std::hypot(scene.tx, scene.ty));
    const double b = deg2rad(bearing.value_or(0.0));
    scene.tx = d * std::cos(b);
    scene.ty = d * std::sin(b);
  }
  scene.validate();
  config.validate();
}

void load_scene_file(const std::filesystem::path& path, SimScene& scene, SimConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scene file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  parse_scene_text(buf.str(), scene, config);
}

std::optional<vision::NormalizedBox> project_target(const SimDrone& drone, const SimScene& scene) {
  const double yaw = deg2rad(drone.yaw_deg);
  const double dx = scene.tx - drone.px;
  const double dy = scene.ty - drone.py;
  const double d_f = std::cos(yaw) * dx + std::sin(yaw) * dy;
  const double d_l = -std::sin(yaw) * dx + std::cos(yaw) * dy;
  const double d_v = scene.tz - drone.pz;
  if (d_f <= kMinVisibleDistance) return std::nullopt;

  vision::NormalizedBox box;
  box.x = 0.5 + kFocal * d_l / d_f;
  box.y = 0.5 - kFocal * d_v / d_f;
  box.h = std::min(1.0, kFocal * scene.target_height / d_f);
  box.w = 0.4 * box.h;
  if (box.x < 0.0 || box.x > 1.0 || box.y < 0.0 || box.y > 1.0) return std::nullopt;
  return box;
}

PixelRect box_to_pixels(const vision::NormalizedBox& box, int width, int height) {
  return {static_cast<int>(std::lround((box.x - box.w / 2) * width)),
          static_cast<int>(std::lround((box.y - box.h / 2) * height)),
          static_cast<int>(std::lround((box.x + box.w / 2) * width)),
          static_cast<int>(std::lround((box.y + box.h / 2) * height))};
}

vision::Frame render_frame(const SimDrone& drone, const SimScene& scene, const SimConfig& config) {
  vision::Frame frame = vision::Frame::filled(config.frame_width, config.frame_height, scene.background);
  if (const auto box = project_target(drone, scene)) {
    const PixelRect r = box_to_pixels(*box, config.frame_width, config.frame_height);
    frame.fill_rect(r.col0, r.row0, r.col1, r.row1, scene.target_color);
  }
  return frame;
}

SimCore::SimCore(SimConfig config, SimScene scene) : config_(config), scene_(scene) {
  config_.validate();
  scene_.validate();
  drone_.battery = std::clamp(config_.initial_battery, 0.0, 100.0);
  // Uncalibrated attitude offset until FTRIM.
  std::mt19937_64 rng(config_.seed);
  std::uniform_real_distribution<double> bias(-2.0, 2.0);
  drone_.pitch_bias_deg = bias(rng);
  drone_.roll_bias_deg = bias(rng);
}

bool SimCore::apply_command(const protocol::AtCommand& cmd) {
  using protocol::CommandKind;
  if (cmd.seq == 1) {
    drone_.last_seq = 0;
  } else if (cmd.seq <= drone_.last_seq) {
    spdlog::debug("sim: dropping stale {} seq {} (last {})", protocol::command_name(cmd.kind), cmd.seq,
                  drone_.last_seq);
    return false;
  }
  drone_.last_seq = cmd.seq;
  drone_.watchdog_timer = 0.0;

  switch (cmd.kind) {
    case CommandKind::kRef:
      on_ref(std::get<protocol::RefBits>(cmd.args));
      break;
    case CommandKind::kPcmd:
      drone_.sticks = std::get<protocol::PcmdArgs>(cmd.args);
      if (is_airborne(drone_.state)) {
        drone_.state = drone_.sticks.progressive ? FlightState::kFlying : FlightState::kHovering;
      }
      break;
    case CommandKind::kFtrim:
      if (drone_.state == FlightState::kLanded) {
        drone_.pitch_bias_deg = 0.0;
        drone_.roll_bias_deg = 0.0;
      }
      break;
    case CommandKind::kConfig: {
      const auto& c = std::get<protocol::ConfigArgs>(cmd.args);
      settings_[c.key] = c.value;
      break;
    }
    case CommandKind::kComwdg:
      drone_.watchdog_tripped = false;
      break;
    case CommandKind::kCtrl:
      break;
  }
  return true;
}

void SimCore::on_ref(const protocol::RefBits& bits) {
  const bool rising_emergency = bits.emergency && !drone_.last_ref_emergency;
  drone_.last_ref_emergency = bits.emergency;
  if (rising_emergency) {
    if (drone_.state == FlightState::kEmergency) {
      drone_.state = FlightState::kLanded;
    } else {
      drone_.state = FlightState::kEmergency;
      drone_.sticks = {};
    }
    return;
  }
  if (drone_.state == FlightState::kEmergency) return;

  if (bits.takeoff) {
    if (drone_.state == FlightState::kLanded && drone_.battery > 0.0) {
      drone_.state = FlightState::kTakingOff;
      drone_.sticks = {};
    }
  } else if (drone_.state == FlightState::kTakingOff || is_airborne(drone_.state)) {
    if (drone_.state != FlightState::kLanding) drone_.state = FlightState::kLanding;
  }
}

void SimCore::step(double dt) {
  time_ += dt;
  drone_.watchdog_timer += dt;
  // Summed tick lengths drift by a few ulps; exactly the timeout is not a trip.
  if (drone_.watchdog_timer > config_.watchdog_timeout + 1e-9) drone_.watchdog_tripped = true;

  double v_fwd = 0.0, v_lat = 0.0, v_z = 0.0, yaw_rate = 0.0;
  switch (drone_.state) {
    case FlightState::kTakingOff:
      v_z = config_.vz_max;
      if (drone_.pz + v_z * dt >= config_.hover_altitude) {
        v_z = (config_.hover_altitude - drone_.pz) / dt;
        drone_.state = FlightState::kHovering;
        drone_.sticks = {};
      }
      break;
    case FlightState::kLanding:
      v_z = -std::min(config_.vz_max, drone_.pz / dt);
      break;
    case FlightState::kFlying:
    case FlightState::kHovering:
      if (!drone_.watchdog_tripped && drone_.sticks.progressive) {
        v_fwd = -drone_.sticks.pitch * config_.v_max;
        v_lat = drone_.sticks.roll * config_.v_max;
        v_z = drone_.sticks.gaz * config_.vz_max;
        yaw_rate = drone_.sticks.yaw * config_.yaw_rate_max;
      }
      break;
    case FlightState::kEmergency:
      drone_.sticks = {};
      v_z = -std::min(kEmergencyFallRate, drone_.pz / dt);
      break;
    case FlightState::kLanded:
    case FlightState::kDisconnected:
      v_z = -std::min(kEmergencyFallRate, drone_.pz / dt);
      break;
  }

  const double yaw = deg2rad(drone_.yaw_deg);
  drone_.px += (std::cos(yaw) * v_fwd - std::sin(yaw) * v_lat) * dt;
  drone_.py += (std::sin(yaw) * v_fwd + std::cos(yaw) * v_lat) * dt;
  drone_.pz = std::max(0.0, drone_.pz + v_z * dt);
  drone_.yaw_deg = std::remainder(drone_.yaw_deg + yaw_rate * dt, 360.0);
  drone_.v_forward = v_fwd;
  drone_.v_lateral = v_lat;
  drone_.v_vertical = v_z;

  if (drone_.state == FlightState::kLanding && drone_.pz <= 0.0) {
    drone_.state = FlightState::kLanded;
    drone_.sticks = {};
  }
  if (drone_.airborne()) {
    drone_.battery = std::max(0.0, drone_.battery - config_.battery_drain * dt);
    if (drone_.battery <= 0.0 && drone_.state != FlightState::kLanding) {
      drone_.state = FlightState::kLanding;
    }
  }
}

std::uint32_t SimCore::state_mask() const noexcept {
  namespace bits = protocol::state_bits;
  std::uint32_t mask = 0;
  if (drone_.airborne()) mask |= bits::kFlying;
  if (drone_.battery < 20.0) mask |= bits::kBatteryLow;
  if (drone_.watchdog_tripped) mask |= bits::kWatchdog;
  if (drone_.state == FlightState::kEmergency) mask |= bits::kEmergency;
  return mask;
}

protocol::NavdataPacket SimCore::navdata_packet() const {
  const bool effective = !drone_.watchdog_tripped && drone_.sticks.progressive && is_airborne(drone_.state);
  protocol::DemoData demo;
  demo.ctrl_state = to_ctrl_state(drone_.state);
  demo.battery_percent = static_cast<std::uint32_t>(std::lround(drone_.battery));
  demo.pitch_mdeg = static_cast<float>(
      ((effective ? drone_.sticks.pitch * kMaxTiltDeg : 0.0) + drone_.pitch_bias_deg) * 1000.0);
  demo.roll_mdeg = static_cast<float>(
      ((effective ? drone_.sticks.roll * kMaxTiltDeg : 0.0) + drone_.roll_bias_deg) * 1000.0);
  demo.yaw_mdeg = static_cast<float>(drone_.yaw_deg * 1000.0);
  demo.altitude_mm = static_cast<std::int32_t>(std::lround(drone_.pz * 1000.0));
  demo.vx_mm_s = static_cast<float>(drone_.v_forward * 1000.0);
  demo.vy_mm_s = static_cast<float>(drone_.v_lateral * 1000.0);
  demo.vz_mm_s = static_cast<float>(drone_.v_vertical * 1000.0);

  protocol::NavdataPacket packet;
  packet.state_mask = state_mask();
  packet.seq = navdata_seq_ + 1;
  packet.vision_flag = target_box() ? 1u : 0u;
  packet.options.push_back(demo.to_option());
  return packet;
}

Bytes SimCore::emit_navdata() {
  Bytes bytes = protocol::build_navdata(navdata_packet());
  ++navdata_seq_;
  return bytes;
}

bool SimCore::link_in_range() const noexcept {
  return std::sqrt(drone_.px * drone_.px + drone_.py * drone_.py + drone_.pz * drone_.pz) <= config_.link_range;
}

TraceResult run_trace(const SimConfig& config, const SimScene& scene, std::span<const TimedCommand> trace,
                      std::uint64_t ticks) {
  SimCore core(config, scene);
  TraceResult out;
  std::size_t next = 0;
  for (std::uint64_t tick = 0; tick < ticks; ++tick) {
    while (next < trace.size() && trace[next].tick <= tick) {
      core.apply_command(trace[next].command);
      ++next;
    }
    core.step();
    if (!core.link_in_range()) continue;
    if (tick_due(tick, config.physics_dt, config.navdata_hz)) out.navdata.push_back(core.emit_navdata());
    if (tick_due(tick, config.physics_dt, config.video_fps)) out.frame_digests.push_back(fnv1a(core.render().pixels));
  }
  out.final_state = core.drone();
  return out;
}

}  // namespace aerovis::sim
