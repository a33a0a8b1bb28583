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

#include "aerovis/protocol/navdata.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "aerovis/protocol/error.hpp"

namespace aerovis::protocol {

NavOption DemoData::to_option() const {
  NavOption option;
  option.tag = kDemoTag;
  option.payload.reserve(kDemoPayloadSize);
  le::put_u32(option.payload, ctrl_state);
  le::put_u32(option.payload, battery_percent);
  le::put_f32(option.payload, pitch_mdeg);
  le::put_f32(option.payload, roll_mdeg);
  le::put_f32(option.payload, yaw_mdeg);
  le::put_u32(option.payload, static_cast<std::uint32_t>(altitude_mm));
  le::put_f32(option.payload, vx_mm_s);
  le::put_f32(option.payload, vy_mm_s);
  le::put_f32(option.payload, vz_mm_s);
  return option;
}

DemoData DemoData::from_option(const NavOption& option) {
  if (option.tag != kDemoTag) throw ProtocolError(ErrorCode::kFormat, "tag", "not a DEMO option");
  if (option.payload.size() < kDemoPayloadSize) {
    throw ProtocolError(ErrorCode::kFormat, "demo", "DEMO payload too short");
  }
  const ByteView p(option.payload);
  DemoData d;
  d.ctrl_state = le::get_u32(p, 0);
  d.battery_percent = le::get_u32(p, 4);
  d.pitch_mdeg = le::get_f32(p, 8);
  d.roll_mdeg = le::get_f32(p, 12);
  d.yaw_mdeg = le::get_f32(p, 16);
  d.altitude_mm = static_cast<std::int32_t>(le::get_u32(p, 20));
  d.vx_mm_s = le::get_f32(p, 24);
  d.vy_mm_s = le::get_f32(p, 28);
  d.vz_mm_s = le::get_f32(p, 32);
  return d;
}

std::uint32_t navdata_checksum(ByteView bytes) noexcept {
  return std::accumulate(bytes.begin(), bytes.end(), std::uint32_t{0},
                         [](std::uint32_t acc, std::uint8_t b) { return acc + b; });
}

Bytes build_navdata(const NavdataPacket& packet) {
  Bytes out;
  std::size_t total = kNavdataHeaderSize + kChecksumOptionSize;
  for (const auto& option : packet.options) total += option.size();
  out.reserve(total);

  le::put_u32(out, kNavdataHeader);
  le::put_u32(out, packet.state_mask);
  le::put_u32(out, packet.seq);
  le::put_u32(out, packet.vision_flag);
  for (const auto& option : packet.options) {
    if (option.tag == kChecksumTag) {
      throw ProtocolError(ErrorCode::kEncoding, "tag", "checksum option is appended automatically");
    }
    if (option.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ProtocolError(ErrorCode::kEncoding, "size", "option payload too large");
    }
    le::put_u16(out, option.tag);
    le::put_u16(out, static_cast<std::uint16_t>(option.size()));
    out.insert(out.end(), option.payload.begin(), option.payload.end());
  }
  const std::uint32_t checksum = navdata_checksum(out);
  le::put_u16(out, kChecksumTag);
  le::put_u16(out, static_cast<std::uint16_t>(kChecksumOptionSize));
  le::put_u32(out, checksum);
  return out;
}

NavdataPacket parse_navdata(ByteView bytes) {
  if (bytes.size() < kNavdataHeaderSize) {
    throw ProtocolError(ErrorCode::kBounds, "header", "packet shorter than the 16-byte header");
  }
  if (le::get_u32(bytes, 0) != kNavdataHeader) {
    throw ProtocolError(ErrorCode::kNotNavdata, "header", "header constant is not 0x55667788");
  }

  // The checksum trailer is located from the end so that corruption anywhere
  // in the body surfaces as an integrity failure rather than a layout one.
  if (bytes.size() < kNavdataHeaderSize + kChecksumOptionSize) {
    throw ProtocolError(ErrorCode::kIntegrity, "checksum", "checksum option missing");
  }
  const std::size_t trailer = bytes.size() - kChecksumOptionSize;
  if (le::get_u16(bytes, trailer) != kChecksumTag ||
      le::get_u16(bytes, trailer + 2) != kChecksumOptionSize) {
    throw ProtocolError(ErrorCode::kIntegrity, "checksum", "checksum option missing or damaged");
  }
  const std::uint32_t stored = le::get_u32(bytes, trailer + 4);
  const std::uint32_t computed = navdata_checksum(bytes.first(trailer));
  if (stored != computed) {
    throw ProtocolError(ErrorCode::kIntegrity, "checksum",
                        "checksum mismatch: stored " + std::to_string(stored) + ", computed " +
                            std::to_string(computed));
  }

  NavdataPacket packet;
  packet.state_mask = le::get_u32(bytes, 4);
  packet.seq = le::get_u32(bytes, 8);
  packet.vision_flag = le::get_u32(bytes, 12);

  std::size_t at = kNavdataHeaderSize;
  while (at < trailer) {
    if (trailer - at < kOptionHeaderSize) {
      throw ProtocolError(ErrorCode::kBounds, "option", "truncated option header");
    }
    const std::uint16_t tag = le::get_u16(bytes, at);
    const std::uint16_t size = le::get_u16(bytes, at + 2);
    if (size < kOptionHeaderSize || size > trailer - at) {
      throw ProtocolError(ErrorCode::kBounds, "option",
                          "option size " + std::to_string(size) + " overruns packet");
    }
    if (tag == kChecksumTag) {
      throw ProtocolError(ErrorCode::kFormat, "option", "checksum option before end of packet");
    }
    NavOption option;
    option.tag = tag;
    option.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at + kOptionHeaderSize),
                          bytes.begin() + static_cast<std::ptrdiff_t>(at + size));
    packet.options.push_back(std::move(option));
    at += size;
  }
  return packet;
}

std::optional<DemoData> find_demo(const NavdataPacket& packet) {
  for (const auto& option : packet.options) {
    if (option.tag == kDemoTag) return DemoData::from_option(option);
  }
  return std::nullopt;
}

}  // namespace aerovis::protocol
