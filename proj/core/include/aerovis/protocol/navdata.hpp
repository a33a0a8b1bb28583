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

// Navdata datagrams (UDP 5554), all fields little-endian:
//
//   offset  size  field
//   0       4     header, always 0x55667788
//   4       4     state mask
//   8       4     sequence number
//   12      4     vision flag
//   16      ...   options: u16 tag, u16 size (incl. these 4 bytes), payload
//   n-8     8     checksum option: tag 0xFFFF, size 8, u32 byte sum of [0, n-8)
//
// Only DEMO (tag 0) is interpreted. Other tags are carried opaquely.

#ifndef AEROVIS_PROTOCOL_NAVDATA_HPP_
#define AEROVIS_PROTOCOL_NAVDATA_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aerovis/protocol/bytes.hpp"

namespace aerovis::protocol {

inline constexpr std::uint32_t kNavdataHeader = 0x55667788u;
inline constexpr std::size_t kNavdataHeaderSize = 16;
inline constexpr std::uint16_t kDemoTag = 0x0000;
inline constexpr std::uint16_t kChecksumTag = 0xFFFF;
inline constexpr std::size_t kOptionHeaderSize = 4;
inline constexpr std::size_t kChecksumOptionSize = 8;
inline constexpr std::size_t kDemoPayloadSize = 36;

// Trigger datagram that starts the navdata stream.
inline constexpr std::uint8_t kNavdataTrigger[4] = {0x01, 0x00, 0x00, 0x00};

namespace state_bits {
inline constexpr std::uint32_t kFlying = 1u << 0;
inline constexpr std::uint32_t kBatteryLow = 1u << 15;
inline constexpr std::uint32_t kWatchdog = 1u << 30;
inline constexpr std::uint32_t kEmergency = 1u << 31;
}  // namespace state_bits

struct NavOption {
  std::uint16_t tag = 0;
  Bytes payload;

  std::size_t size() const noexcept { return kOptionHeaderSize + payload.size(); }
  bool operator==(const NavOption&) const = default;
};

// The checksum option is not part of `options`; it is appended by
// build_navdata and verified and stripped by parse_navdata.
struct NavdataPacket {
  std::uint32_t state_mask = 0;
  std::uint32_t seq = 0;
  std::uint32_t vision_flag = 0;
  std::vector<NavOption> options;

  bool operator==(const NavdataPacket&) const = default;
};

// DEMO option. Angles are milli-degrees, altitude millimeters, speeds mm/s.
struct DemoData {
  std::uint32_t ctrl_state = 0;
  std::uint32_t battery_percent = 0;
  float pitch_mdeg = 0.0f;
  float roll_mdeg = 0.0f;
  float yaw_mdeg = 0.0f;
  std::int32_t altitude_mm = 0;
  float vx_mm_s = 0.0f;
  float vy_mm_s = 0.0f;
  float vz_mm_s = 0.0f;

  NavOption to_option() const;
  // Throws ProtocolError(kFormat) if the option is not a well-sized DEMO block.
  static DemoData from_option(const NavOption& option);

  bool operator==(const DemoData&) const = default;
};

// (sum of all byte values) mod 2^32.
std::uint32_t navdata_checksum(ByteView bytes) noexcept;

// Throws ProtocolError(kEncoding) if an option uses the checksum tag or does
// not fit the 16-bit size field.
Bytes build_navdata(const NavdataPacket& packet);

// Errors: kBounds for truncation, kNotNavdata for a wrong header constant,
// kIntegrity for a missing/damaged checksum option or a checksum mismatch,
// kFormat for a misplaced checksum tag.
NavdataPacket parse_navdata(ByteView bytes);

std::optional<DemoData> find_demo(const NavdataPacket& packet);

}  // namespace aerovis::protocol

#endif  // AEROVIS_PROTOCOL_NAVDATA_HPP_
