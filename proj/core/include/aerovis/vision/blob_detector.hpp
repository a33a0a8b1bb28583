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

#ifndef AEROVIS_VISION_BLOB_DETECTOR_HPP_
#define AEROVIS_VISION_BLOB_DETECTOR_HPP_

#include <cstddef>
#include <vector>

#include "aerovis/vision/frame.hpp"

namespace aerovis::vision {

inline constexpr std::size_t kDefaultMinBlobArea = 30;

// Color-blob reference detector.
//
// A pixel matches when every channel is within `tolerance` of `target`.
// Matching pixels are grouped into 4-connected components; each component
// of at least `min_area_px` pixels yields one class-0 detection whose box is
// the component's pixel bounding box normalized by the frame dimensions and
// whose confidence is matched pixels / bounding-box pixels. Results are
// ordered by matched area, largest first.
std::vector<Detection> detect_blob(const Frame& frame, Rgb target, int tolerance,
                                   std::size_t min_area_px = kDefaultMinBlobArea);

struct BlobDetectorConfig {
  Rgb target{220, 40, 40};
  int tolerance = 40;
  std::size_t min_area_px = kDefaultMinBlobArea;
};

class BlobDetector final : public Detector {
 public:
  explicit BlobDetector(BlobDetectorConfig config = {});

  std::vector<Detection> detect(const Frame& frame) const override;
  const BlobDetectorConfig& config() const noexcept { return config_; }

 private:
  BlobDetectorConfig config_;
};

}  // namespace aerovis::vision

#endif  // AEROVIS_VISION_BLOB_DETECTOR_HPP_
