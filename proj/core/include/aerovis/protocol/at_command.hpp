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

// AT command channel (UDP 5556).
//
// Grammar of one command line:
//
//   "AT*" NAME "=" seq ("," arg)* "\r"
//
// ASCII only, a single carriage return terminates the line and no line feed
// follows. Real-valued stick arguments travel as the decimal rendering of the
// signed 32-bit integer sharing the value's binary32 bit pattern.

#ifndef AEROVIS_PROTOCOL_AT_COMMAND_HPP_
#define AEROVIS_PROTOCOL_AT_COMMAND_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aerovis::protocol {

inline constexpr std::uint16_t kCommandPort = 5556;
inline constexpr std::uint16_t kNavdataPort = 5554;
inline constexpr std::uint16_t kVideoPort = 5555;

inline constexpr std::size_t kMaxAtLineLength = 1024;

// Bits 18, 20, 22, 24 and 28 are set in every REF argument.
inline constexpr std::uint32_t kRefBaseMask = (1u << 18) | (1u << 20) | (1u << 22) |
                                              (1u << 24) | (1u << 28);
inline constexpr std::uint32_t kRefTakeoffBit = 1u << 9;
inline constexpr std::uint32_t kRefEmergencyBit = 1u << 8;
static_assert(kRefBaseMask == 290717696u);

enum class CommandKind : std::uint8_t { kRef, kPcmd, kFtrim, kConfig, kComwdg, kCtrl };

std::string_view command_name(CommandKind kind) noexcept;
std::optional<CommandKind> command_kind_from_name(std::string_view name) noexcept;

struct RefBits {
  bool takeoff = false;
  bool emergency = false;

  std::uint32_t value() const noexcept {
    return kRefBaseMask | (takeoff ? kRefTakeoffBit : 0u) | (emergency ? kRefEmergencyBit : 0u);
  }

  bool operator==(const RefBits&) const = default;
};

// Stick fractions in [-1, 1]. Encoding clamps; parsing rejects out-of-range.
struct PcmdArgs {
  bool progressive = false;
  float roll = 0.0f;
  float pitch = 0.0f;
  float gaz = 0.0f;
  float yaw = 0.0f;

  bool operator==(const PcmdArgs&) const = default;
};

struct ConfigArgs {
  std::string key;
  std::string value;

  bool operator==(const ConfigArgs&) const = default;
};

using AtArgs = std::variant<std::monostate, RefBits, PcmdArgs, ConfigArgs>;

struct AtCommand {
  CommandKind kind = CommandKind::kComwdg;
  std::uint32_t seq = 1;
  AtArgs args;

  static AtCommand ref(std::uint32_t seq, RefBits bits) { return {CommandKind::kRef, seq, bits}; }
  static AtCommand pcmd(std::uint32_t seq, PcmdArgs sticks) {
    return {CommandKind::kPcmd, seq, sticks};
  }
  static AtCommand ftrim(std::uint32_t seq) { return {CommandKind::kFtrim, seq, {}}; }
  static AtCommand config(std::uint32_t seq, std::string key, std::string value) {
    return {CommandKind::kConfig, seq, ConfigArgs{std::move(key), std::move(value)}};
  }
  static AtCommand comwdg(std::uint32_t seq) { return {CommandKind::kComwdg, seq, {}}; }
  static AtCommand ctrl(std::uint32_t seq) { return {CommandKind::kCtrl, seq, {}}; }

  bool operator==(const AtCommand&) const = default;
};

// Float argument codec. Throws ProtocolError(kInvalidInput) on NaN/inf.
std::int32_t encode_float_arg(double v);
float decode_float_arg(std::int32_t encoded) noexcept;

// Throws ProtocolError(kEncoding) when the command violates its invariants
// or the rendered line would exceed kMaxAtLineLength.
std::string encode_at(const AtCommand& cmd);

// Parses exactly one line, terminator included.
AtCommand parse_at(std::string_view line);

// Splits a datagram holding several concatenated commands into lines, each
// keeping its terminator. A trailing fragment without '\r' is returned too so
// that parse_at can report it.
std::vector<std::string_view> split_at_datagram(std::string_view datagram);

}  // namespace aerovis::protocol

#endif  // AEROVIS_PROTOCOL_AT_COMMAND_HPP_
