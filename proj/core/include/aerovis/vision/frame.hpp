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

#ifndef AEROVIS_VISION_FRAME_HPP_
#define AEROVIS_VISION_FRAME_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aerovis::vision {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

// Row-major RGB8 image. pixels.size() == width * height * 3.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static Frame filled(int width, int height, Rgb color);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  bool valid() const noexcept {
    return width >= 0 && height >= 0 &&
           pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  }

  Rgb at(int col, int row) const noexcept {
    const std::size_t i = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(col)) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }

  void set(int col, int row, Rgb c) noexcept {
    const std::size_t i = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(col)) * 3;
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }

  // Fills the half-open pixel rectangle [col0, col1) x [row0, row1), clipped.
  void fill_rect(int col0, int row0, int col1, int row1, Rgb c) noexcept;

  bool operator==(const Frame&) const = default;
};

// Center-format box in frame-relative units.
struct NormalizedBox {
  double x = 0.5;
  double y = 0.5;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const NormalizedBox&) const = default;
};

struct Detection {
  NormalizedBox box;
  int class_id = 0;
  double confidence = 0.0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const Frame& frame) const = 0;
};

}  // namespace aerovis::vision

#endif  // AEROVIS_VISION_FRAME_HPP_
