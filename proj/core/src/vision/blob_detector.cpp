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

#include "aerovis/vision/blob_detector.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace aerovis::vision {
namespace {

struct Component {
  std::size_t area = 0;
  int min_col, max_col, min_row, max_row;
};

}  // namespace

std::vector<Detection> detect_blob(const Frame& frame, Rgb target, int tolerance,
                                   std::size_t min_area_px) {
  if (tolerance < 0) throw std::invalid_argument("blob tolerance must be >= 0");
  if (!frame.valid()) throw std::invalid_argument("frame pixel buffer does not match dimensions");
  if (frame.empty()) return {};

  const int w = frame.width;
  const int h = frame.height;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

  std::vector<std::uint8_t> match(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = &frame.pixels[i * 3];
    match[i] = std::abs(int{p[0]} - target.r) <= tolerance &&
               std::abs(int{p[1]} - target.g) <= tolerance &&
               std::abs(int{p[2]} - target.b) <= tolerance;
  }

  std::vector<Component> components;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (match[seed] != 1) continue;
    Component c{0, w, -1, h, -1};
    match[seed] = 2;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int col = static_cast<int>(i % static_cast<std::size_t>(w));
      const int row = static_cast<int>(i / static_cast<std::size_t>(w));
      ++c.area;
      c.min_col = std::min(c.min_col, col);
      c.max_col = std::max(c.max_col, col);
      c.min_row = std::min(c.min_row, row);
      c.max_row = std::max(c.max_row, row);
      auto visit = [&](std::size_t j) {
        if (match[j] == 1) {
          match[j] = 2;
          stack.push_back(j);
        }
      };
      if (col > 0) visit(i - 1);
      if (col + 1 < w) visit(i + 1);
      if (row > 0) visit(i - static_cast<std::size_t>(w));
      if (row + 1 < h) visit(i + static_cast<std::size_t>(w));
    }
    if (c.area >= min_area_px) components.push_back(c);
  }

  std::stable_sort(components.begin(), components.end(),
                   [](const Component& a, const Component& b) { return a.area > b.area; });

  std::vector<Detection> out;
  out.reserve(components.size());
  for (const auto& c : components) {
    const double bw = c.max_col - c.min_col + 1;
    const double bh = c.max_row - c.min_row + 1;
    Detection d;
    d.box.x = (c.min_col + c.max_col + 1) / (2.0 * w);
    d.box.y = (c.min_row + c.max_row + 1) / (2.0 * h);
    d.box.w = bw / w;
    d.box.h = bh / h;
    d.class_id = 0;
    d.confidence = static_cast<double>(c.area) / (bw * bh);
    out.push_back(d);
  }
  return out;
}

BlobDetector::BlobDetector(BlobDetectorConfig config) : config_(config) {
  if (config_.tolerance < 0) throw std::invalid_argument("blob tolerance must be >= 0");
}

std::vector<Detection> BlobDetector::detect(const Frame& frame) const {
  return detect_blob(frame, config_.target, config_.tolerance, config_.min_area_px);
}

}  // namespace aerovis::vision
