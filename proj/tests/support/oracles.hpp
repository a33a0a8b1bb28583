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

// Reference computations written without the library under test. Each one
// is deliberately naive so it can be checked by reading.

#ifndef AEROVIS_TESTS_SUPPORT_ORACLES_HPP_
#define AEROVIS_TESTS_SUPPORT_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace aerovis::testing {

// IEEE-754 binary32 bits of a double, rounded to nearest-even, built from
// the double's fields with integer arithmetic. Finite inputs below the
// binary32 overflow threshold only.
inline std::uint32_t binary32_bits(double v) {
  std::uint64_t d;
  std::memcpy(&d, &v, sizeof d);
  const std::uint32_t sign = static_cast<std::uint32_t>(d >> 63) << 31;
  const int exp11 = static_cast<int>((d >> 52) & 0x7FF);
  const std::uint64_t frac52 = d & ((std::uint64_t{1} << 52) - 1);
  if (exp11 == 0) return sign;  // zero or double subnormal: far below binary32's range

  // Significand with the hidden bit, and the shift that leaves 23 fraction
  // bits (or fewer for binary32 subnormals).
  const std::uint64_t sig = (std::uint64_t{1} << 52) | frac52;
  int e = exp11 - 1023 + 127;
  int shift = 29;
  if (e <= 0) {
    shift += 1 - e;
    e = 0;
  }
  if (shift >= 64) return sign;

  std::uint64_t kept = sig >> shift;
  const std::uint64_t rest = sig & ((std::uint64_t{1} << shift) - 1);
  const std::uint64_t half = std::uint64_t{1} << (shift - 1);
  if (rest > half || (rest == half && (kept & 1))) ++kept;

  // For normals `kept` carries the hidden bit at position 23; adding the
  // biased exponent minus one folds it in, and a rounding carry into bit 24
  // bumps the exponent on its own.
  std::uint64_t bits = e == 0 ? kept : (static_cast<std::uint64_t>(e - 1) << 23) + kept;
  return sign | static_cast<std::uint32_t>(bits);
}

// Two's-complement reading of a 32-bit pattern.
inline std::int32_t as_signed(std::uint32_t bits) {
  return bits >= 0x80000000u ? static_cast<std::int32_t>(static_cast<std::int64_t>(bits) - 0x100000000LL)
                             : static_cast<std::int32_t>(bits);
}

inline std::uint32_t byte_sum(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t total = 0;
  for (auto b : bytes) total += b;
  return static_cast<std::uint32_t>(total & 0xFFFFFFFFu);
}

// The tracking decision ladder, transcribed line by line from the original
// Python listing.
inline std::string reference_take_action(double x, double y, double h, bool corrected = false) {
  const double EPS_HORIZONTAL = 0.1;
  const double EPS_VERTICAL = 0.3;
  const double EPS_HEIGHT = 0.3;
  if (std::fabs(x - 0.5) <= EPS_HORIZONTAL && std::fabs(y - 0.5) <= EPS_VERTICAL &&
      std::fabs(h - 0.5) <= EPS_HEIGHT) {
    return "hover";
  }
  if (x >= 0.5 + EPS_HORIZONTAL) return "right";
  if (x <= 0.5 - EPS_HORIZONTAL) return "left";
  if (y >= 0.5 + EPS_VERTICAL) return "down";
  if (y <= 0.5 - EPS_VERTICAL) return "up";
  if (h >= (corrected ? 0.5 : 1.0) + EPS_HEIGHT) return "backward";
  return "forward";
}

// Frozen values, worked out by hand before the build.
//   REF base: 2^18 + 2^20 + 2^22 + 2^24 + 2^28
//     = 262144 + 1048576 + 4194304 + 16777216 + 268435456 = 290717696
//   takeoff adds 2^9 = 512, emergency adds 2^8 = 256.
inline constexpr std::uint32_t kRefLand = 290717696u;
inline constexpr std::uint32_t kRefTakeoff = 290718208u;
inline constexpr std::uint32_t kRefEmergency = 290717952u;
// -0.8 as binary32 is 0xBF4CCCCD; read as signed: 3209481421 - 2^32.
inline constexpr std::int32_t kMinusPointEightArg = -1085485875;
// Options-free navdata, state 0, seq 1: checksum over the 16-byte header
// 88 77 66 55 | 00 00 00 00 | 01 00 00 00 | 00 00 00 00 = 443.
inline constexpr std::uint32_t kEmptyNavdataChecksum = 443u;

}  // namespace aerovis::testing

#endif  // AEROVIS_TESTS_SUPPORT_ORACLES_HPP_
