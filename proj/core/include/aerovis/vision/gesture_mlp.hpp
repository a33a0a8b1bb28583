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

// Gesture classifier: 63 hand-keypoint coordinates -> 50 leaky-ReLU units ->
// 6-way softmax.

#ifndef AEROVIS_VISION_GESTURE_MLP_HPP_
#define AEROVIS_VISION_GESTURE_MLP_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aerovis::vision {

inline constexpr std::size_t kHandLandmarks = 21;
inline constexpr std::size_t kKeypointDim = kHandLandmarks * 3;
inline constexpr std::size_t kHiddenUnits = 50;
inline constexpr std::size_t kGestureClasses = 6;
inline constexpr double kLeakySlope = 0.01;

// 21 landmarks x (x, y, z).
using HandKeypoints = std::array<double, kKeypointDim>;
using ClassProbabilities = std::array<double, kGestureClasses>;

// The gesture vocabulary. The numbering is the classifier's label space.
enum class Gesture : int { kTakeoff = 0, kLand = 1, kRight = 2, kLeft = 3, kForward = 4, kBackward = 5 };

std::string_view to_string(Gesture g) noexcept;
std::optional<Gesture> gesture_from_label(int label) noexcept;

struct GestureSample {
  HandKeypoints keypoints{};
  int label = 0;

  bool operator==(const GestureSample&) const = default;
};

// Row-major weights: w1 is kHiddenUnits x kKeypointDim, w2 is
// kGestureClasses x kHiddenUnits.
struct MlpParams {
  std::vector<double> w1 = std::vector<double>(kHiddenUnits * kKeypointDim, 0.0);
  std::vector<double> b1 = std::vector<double>(kHiddenUnits, 0.0);
  std::vector<double> w2 = std::vector<double>(kGestureClasses * kHiddenUnits, 0.0);
  std::vector<double> b2 = std::vector<double>(kGestureClasses, 0.0);

  bool has_valid_shape() const noexcept;
  bool all_finite() const noexcept;

  // The four tensors in file order: w1, b1, w2, b2.
  std::array<std::span<double>, 4> tensors() noexcept;
  std::array<std::span<const double>, 4> tensors() const noexcept;

  // this += scale * other
  void add_scaled(const MlpParams& other, double scale);

  bool operator==(const MlpParams&) const = default;
};

inline double leaky_relu(double t) noexcept { return t >= 0.0 ? t : kLeakySlope * t; }

// Throws std::invalid_argument on non-finite keypoints or malformed params.
ClassProbabilities mlp_forward(const MlpParams& params, std::span<const double> keypoints);

struct LossAndGrad {
  double loss = 0.0;
  MlpParams grad;
};

// Mean cross-entropy over the batch and its gradient. Throws
// std::invalid_argument for an empty batch or a label outside [0, 6).
LossAndGrad mlp_loss_and_grad(const MlpParams& params, std::span<const GestureSample> batch);

// Mean cross-entropy only.
double mlp_loss(const MlpParams& params, std::span<const GestureSample> batch);

struct GesturePrediction {
  Gesture label = Gesture::kTakeoff;
  double confidence = 0.0;
};

// Argmax of mlp_forward; ties resolve to the lowest label.
GesturePrediction predict_gesture(const MlpParams& params, std::span<const double> keypoints);

double accuracy(const MlpParams& params, std::span<const GestureSample> samples);

}  // namespace aerovis::vision

#endif  // AEROVIS_VISION_GESTURE_MLP_HPP_
