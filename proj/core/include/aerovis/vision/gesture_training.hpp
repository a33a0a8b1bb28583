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

#ifndef AEROVIS_VISION_GESTURE_TRAINING_HPP_
#define AEROVIS_VISION_GESTURE_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aerovis/vision/gesture_mlp.hpp"

namespace aerovis::vision {

inline constexpr std::size_t kDefaultGestureDatasetSize = 328;
inline constexpr double kSynthNoiseSigma = 0.02;

// Noise-free keypoints of the canonical pose for a gesture:
//   takeoff  open palm, all five fingers extended upward
//   land     fist, every finger folded
//   right    index finger pointing to image right, others folded
//   left     index finger pointing to image left, others folded
//   forward  index and middle fingers extended upward (V sign)
//   backward thumb and little finger extended, others folded
HandKeypoints gesture_template(Gesture gesture);

// Templates plus i.i.d. N(0, 0.02^2) noise per coordinate. Class counts
// differ by at most one; the sample order is shuffled. Throws
// std::invalid_argument for n < 6.
std::vector<GestureSample> synth_gesture_dataset(std::size_t n, std::uint64_t seed);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<GestureSample> train;
  std::vector<GestureSample> val;
  std::vector<GestureSample> test;
};

// Per-class shuffled partition. Each class of n samples contributes
// round(r_train * n) to train and round((r_train + r_val) * n) - that to
// val; the remainder goes to test. Throws std::invalid_argument if a ratio
// is negative, the ratios do not sum to 1, or any gesture class is empty.
DatasetSplit stratified_split(const std::vector<GestureSample>& dataset, SplitRatios ratios,
                              std::uint64_t seed);

struct TrainConfig {
  SplitRatios ratios;
  bool stratified = true;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  std::uint64_t seed = 7;
};

struct TrainMetrics {
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  // Mean training-set cross-entropy after each epoch.
  std::vector<double> loss_curve;
  // 0 means the initial parameters were never beaten on validation.
  std::size_t best_epoch = 0;
};

struct TrainResult {
  MlpParams params;
  TrainMetrics metrics;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::size_t epoch, const std::string& message)
      : std::runtime_error("epoch " + std::to_string(epoch) + ": " + message), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

// Glorot-uniform weights, zero biases.
MlpParams initial_params(std::uint64_t seed);

// Mini-batch gradient descent on mean cross-entropy. Returns the parameters
// with the best validation accuracy (ties: lower validation loss, then the
// earlier epoch). Deterministic for a given seed.
TrainResult train_gestures(const std::vector<GestureSample>& dataset, const TrainConfig& config);

// Runs the optimizer on an explicit split.
TrainResult train_on_split(const DatasetSplit& split, const TrainConfig& config);

}  // namespace aerovis::vision

#endif  // AEROVIS_VISION_GESTURE_TRAINING_HPP_
