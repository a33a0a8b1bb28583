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

#include "aerovis/protocol/video.hpp"

#include <algorithm>
#include <string>

#include "aerovis/protocol/error.hpp"

namespace aerovis::protocol {
namespace {

void validate(const VideoFrameHeader& h) {
  if (h.header_size < kVideoHeaderFixedSize) {
    throw ProtocolError(ErrorCode::kFormat, "header_size",
                        "header_size " + std::to_string(h.header_size) + " below 20");
  }
  if (h.codec == kCodecRawRgb24) {
    const std::uint64_t expected = std::uint64_t{h.display_width} * h.display_height * 3;
    if (h.payload_size != expected) {
      throw ProtocolError(ErrorCode::kFormat, "payload_size",
                          "raw RGB24 payload must be width*height*3 = " + std::to_string(expected));
    }
  }
}

}  // namespace

Bytes write_video_header(const VideoFrameHeader& header) {
  validate(header);
  Bytes out(kPaveSignature.begin(), kPaveSignature.end());
  out.reserve(header.header_size);
  out.push_back(header.version);
  out.push_back(header.codec);
  le::put_u16(out, header.header_size);
  le::put_u32(out, header.payload_size);
  le::put_u16(out, header.display_width);
  le::put_u16(out, header.display_height);
  le::put_u32(out, header.frame_number);
  out.resize(header.header_size, 0);
  return out;
}

VideoFrameHeader parse_video_header(ByteView bytes) {
  if (bytes.size() < kVideoHeaderFixedSize) {
    throw ProtocolError(ErrorCode::kBounds, "header", "fewer than 20 header bytes");
  }
  if (!std::equal(kPaveSignature.begin(), kPaveSignature.end(), bytes.begin())) {
    throw ProtocolError(ErrorCode::kNotVideoFrame, "signature", "signature is not 'PaVE'");
  }
  VideoFrameHeader h;
  h.version = bytes[4];
  h.codec = bytes[5];
  h.header_size = le::get_u16(bytes, 6);
  h.payload_size = le::get_u32(bytes, 8);
  h.display_width = le::get_u16(bytes, 12);
  h.display_height = le::get_u16(bytes, 14);
  h.frame_number = le::get_u32(bytes, 16);
  validate(h);
  return h;
}

}  // namespace aerovis::protocol
