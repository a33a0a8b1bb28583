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

#ifndef AEROVIS_PROTOCOL_VIDEO_HPP_
#define AEROVIS_PROTOCOL_VIDEO_HPP_

#include <array>
#include <cstddef>
#include <cstdint>

#include "aerovis/protocol/bytes.hpp"

namespace aerovis::protocol {

inline constexpr std::array<std::uint8_t, 4> kPaveSignature = {'P', 'a', 'V', 'E'};
inline constexpr std::uint8_t kCodecRawRgb24 = 0xFF;

// signature(4) version(1) codec(1) header_size(2) payload_size(4)
// display_width(2) display_height(2) frame_number(4)
inline constexpr std::size_t kVideoHeaderFixedSize = 20;

struct VideoFrameHeader {
  std::uint8_t version = 1;
  std::uint8_t codec = kCodecRawRgb24;
  std::uint16_t header_size = kVideoHeaderFixedSize;
  std::uint32_t payload_size = 0;
  std::uint16_t display_width = 0;
  std::uint16_t display_height = 0;
  std::uint32_t frame_number = 0;

  bool operator==(const VideoFrameHeader&) const = default;
};

// Emits header_size bytes; anything past the fixed fields is zero padding.
Bytes write_video_header(const VideoFrameHeader& header);

// Decodes the fixed fields. Callers skip to header_size before the payload.
// Errors: kBounds (short input), kNotVideoFrame (signature), kFormat
// (header_size too small or raw payload size inconsistent with dimensions).
VideoFrameHeader parse_video_header(ByteView bytes);

}  // namespace aerovis::protocol

#endif  // AEROVIS_PROTOCOL_VIDEO_HPP_
