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

#include "aerovis/vision/frame.hpp"

#include <algorithm>
#include <stdexcept>

namespace aerovis::vision {

Frame Frame::filled(int width, int height, Rgb color) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative frame dimensions");
  Frame f;
  f.width = width;
  f.height = height;
  f.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < f.pixels.size(); i += 3) {
    f.pixels[i] = color.r;
    f.pixels[i + 1] = color.g;
    f.pixels[i + 2] = color.b;
  }
  return f;
}

void Frame::fill_rect(int col0, int row0, int col1, int row1, Rgb c) noexcept {
  col0 = std::max(col0, 0);
  row0 = std::max(row0, 0);
  col1 = std::min(col1, width);
  row1 = std::min(row1, height);
  for (int row = row0; row < row1; ++row) {
    for (int col = col0; col < col1; ++col) set(col, row, c);
  }
}

}  // namespace aerovis::vision
