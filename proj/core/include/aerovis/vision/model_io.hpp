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

// Gesture model file:
//
//   "AVMLP1"                      6 bytes
//   63, 50, 6                     u32 each, little-endian
//   w1 (50x63), b1, w2 (6x50), b2 row-major float64, little-endian
//
// Gesture dataset file: CSV with a header row k0..k62,label followed by one
// row of 63 keypoint values and an integer label per sample.

#ifndef AEROVIS_VISION_MODEL_IO_HPP_
#define AEROVIS_VISION_MODEL_IO_HPP_

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "aerovis/protocol/bytes.hpp"
#include "aerovis/vision/gesture_mlp.hpp"

namespace aerovis::vision {

inline constexpr char kModelMagic[] = "AVMLP1";

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Bytes serialize_model(const MlpParams& params);
MlpParams deserialize_model(ByteView bytes);

void save_model(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_model(const std::filesystem::path& path);

void write_dataset_csv(const std::filesystem::path& path, const std::vector<GestureSample>& samples);
std::vector<GestureSample> read_dataset_csv(const std::filesystem::path& path);

}  // namespace aerovis::vision

#endif  // AEROVIS_VISION_MODEL_IO_HPP_
