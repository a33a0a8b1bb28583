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

#include "aerovis/gateway/envelope.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerovis::gateway {

using nlohmann::json;

namespace {

json parse_id(const std::string& id_json) {
  try {
    return json::parse(id_json);
  } catch (const json::exception&) {
    return nullptr;
  }
}

std::string fail(const std::string& id_json, std::string_view message) {
  return error_envelope(id_json, message);
}

}  // namespace

std::string ack_envelope(const std::string& id_json) {
  return json{{"type", "ack"}, {"id", parse_id(id_json)}}.dump();
}

std::string error_envelope(const std::string& id_json, std::string_view message) {
  return json{{"type", "error"}, {"id", parse_id(id_json)}, {"message", std::string(message)}}.dump();
}

ParsedMessage parse_ws_message(std::string_view text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return fail("null", "malformed JSON");
  }
  if (!msg.is_object()) return fail("null", "envelope must be a JSON object");

  CommandRequest req;
  const auto id = msg.find("id");
  if (id == msg.end() || id->is_null()) {
    return fail("null", "command id missing");
  }
  req.id_json = id->dump();

  const auto type = msg.find("type");
  if (type == msg.end() || !type->is_string() || type->get<std::string>() != "command") {
    return fail(req.id_json, "envelope type must be \"command\"");
  }
  const auto name = msg.find("name");
  if (name == msg.end() || !name->is_string()) return fail(req.id_json, "command name missing");
  req.name = name->get<std::string>();
  if (std::find(kCommandNames.begin(), kCommandNames.end(), req.name) == kCommandNames.end()) {
    return fail(req.id_json, "unknown command '" + req.name + "'");
  }

  json params = json::object();
  if (const auto p = msg.find("params"); p != msg.end() && !p->is_null()) {
    if (!p->is_object()) return fail(req.id_json, "params must be an object");
    params = *p;
  }

  if (req.name == "move") {
    const auto dir = params.find("direction");
    if (dir == params.end() || !dir->is_string()) return fail(req.id_json, "move needs params.direction");
    const auto parsed = move_direction_from_string(dir->get<std::string>());
    if (!parsed) return fail(req.id_json, "unknown direction '" + dir->get<std::string>() + "'");
    req.direction = *parsed;
    if (const auto speed = params.find("speed"); speed != params.end()) {
      if (!speed->is_number()) return fail(req.id_json, "params.speed must be a number");
      req.speed = speed->get<double>();
      if (!std::isfinite(req.speed)) return fail(req.id_json, "params.speed must be finite");
    }
  } else if (req.name == "track") {
    const auto enabled = params.find("enabled");
    if (enabled == params.end() || !enabled->is_boolean()) {
      return fail(req.id_json, "track needs boolean params.enabled");
    }
    req.enabled = enabled->get<bool>();
  }
  return req;
}

std::string telemetry_envelope(const TelemetryView& view) {
  const auto& s = view.snapshot;
  json box = nullptr;
  if (view.box) box = {{"x", view.box->x}, {"y", view.box->y}, {"w", view.box->w}, {"h", view.box->h}};
  return json{{"type", "telemetry"},
              {"state", std::string(to_string(view.state))},
              {"battery", s.battery_percent},
              {"pitch", s.pitch_deg},
              {"roll", s.roll_deg},
              {"yaw", s.yaw_deg},
              {"altitude", s.altitude_m},
              {"vx", s.vx},
              {"vy", s.vy},
              {"vz", s.vz},
              {"state_mask", s.state_mask},
              {"link_ok", s.link_ok},
              {"action", std::string(control::to_string(view.action))},
              {"tracking", view.tracking},
              {"box", box}}
      .dump();
}

std::string track_envelope(bool enabled, control::TrackAction action) {
  return json{{"type", "track"}, {"enabled", enabled}, {"action", std::string(control::to_string(action))}}
      .dump();
}

std::string execute_request(const CommandRequest& request, GatewayBackend& backend) {
  try {
    backend.execute(request);
  } catch (const std::exception& e) {
    return error_envelope(request.id_json, e.what());
  }
  return ack_envelope(request.id_json);
}

std::string handle_ws_message(std::string_view text, GatewayBackend& backend) {
  auto parsed = parse_ws_message(text);
  if (auto* err = std::get_if<std::string>(&parsed)) return *err;
  return execute_request(std::get<CommandRequest>(parsed), backend);
}

Bytes encode_frame_message(const vision::Frame& frame, std::uint32_t seq) {
  if (!frame.valid() || frame.width > 65535 || frame.height > 65535) {
    throw std::invalid_argument("frame cannot be encoded");
  }
  Bytes out;
  out.reserve(8 + frame.pixels.size());
  protocol::le::put_u16(out, static_cast<std::uint16_t>(frame.width));
  protocol::le::put_u16(out, static_cast<std::uint16_t>(frame.height));
  protocol::le::put_u32(out, seq);
  out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
  return out;
}

FrameMessage decode_frame_message(ByteView bytes) {
  if (bytes.size() < 8) throw std::invalid_argument("frame message shorter than its header");
  FrameMessage m;
  m.frame.width = protocol::le::get_u16(bytes, 0);
  m.frame.height = protocol::le::get_u16(bytes, 2);
  m.seq = protocol::le::get_u32(bytes, 4);
  const std::size_t expected = std::size_t{8} + std::size_t(m.frame.width) * std::size_t(m.frame.height) * 3;
  if (bytes.size() != expected) throw std::invalid_argument("frame message payload length mismatch");
  m.frame.pixels.assign(bytes.begin() + 8, bytes.end());
  return m;
}

}  // namespace aerovis::gateway
