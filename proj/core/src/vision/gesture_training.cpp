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

#include "aerovis/vision/gesture_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace aerovis::vision {
namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }

Vec3 unit(double x, double y) {
  const double n = std::hypot(x, y);
  return {x / n, y / n, 0.0};
}

// Image coordinates: x grows to the right, y grows downward, z toward the
// camera is negative. The hand is seen palm-on with the wrist at the bottom.
constexpr Vec3 kWrist{0.50, 0.85, 0.0};

struct Digit {
  std::size_t first_landmark;  // base joint; three more joints follow
  Vec3 base;
  Vec3 natural;                // direction when extended in the rest pose
  std::array<double, 3> segments;
};

const std::array<Digit, 5>& digits() {
  static const std::array<Digit, 5> kDigits = {{
      {1, {0.43, 0.79, -0.01}, unit(-0.8, -0.6), {0.05, 0.04, 0.03}},     // thumb
      {5, {0.44, 0.62, -0.01}, unit(-0.15, -1.0), {0.07, 0.045, 0.035}},  // index
      {9, {0.50, 0.60, -0.01}, unit(0.0, -1.0), {0.075, 0.05, 0.035}},    // middle
      {13, {0.56, 0.62, -0.01}, unit(0.12, -1.0), {0.07, 0.045, 0.03}},   // ring
      {17, {0.61, 0.66, -0.01}, unit(0.25, -1.0), {0.05, 0.035, 0.03}},   // little
  }};
  return kDigits;
}

enum class Pose { kFolded, kExtended };

void place_digit(HandKeypoints& out, const Digit& digit, Pose pose, Vec3 direction) {
  std::array<Vec3, 4> joints;
  joints[0] = digit.base;
  if (pose == Pose::kExtended) {
    for (std::size_t s = 0; s < 3; ++s) {
      joints[s + 1] = joints[s] + digit.segments[s] * direction + Vec3{0.0, 0.0, -0.005};
    }
  } else if (digit.first_landmark == 1) {
    // Thumb tucked across the palm.
    joints[1] = joints[0] + Vec3{0.03, -0.03, -0.02};
    joints[2] = joints[1] + Vec3{0.03, 0.0, -0.02};
    joints[3] = joints[2] + Vec3{0.025, 0.01, -0.01};
  } else {
    // Finger curled back toward the palm.
    const Vec3 back = -1.0 * digit.natural;
    joints[1] = joints[0] + 0.035 * digit.natural + Vec3{0.0, 0.0, -0.03};
    joints[2] = joints[1] + 0.025 * back + Vec3{0.0, 0.0, -0.02};
    joints[3] = joints[2] + 0.02 * back + Vec3{0.0, 0.0, 0.01};
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const std::size_t at = (digit.first_landmark + j) * 3;
    out[at] = joints[j].x;
    out[at + 1] = joints[j].y;
    out[at + 2] = joints[j].z;
  }
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kDataStream = 4;

}  // namespace

HandKeypoints gesture_template(Gesture gesture) {
  HandKeypoints k{};
  k[0] = kWrist.x;
  k[1] = kWrist.y;
  k[2] = kWrist.z;

  // Which digits are extended (thumb, index, middle, ring, little).
  std::array<bool, 5> extended{};
  Vec3 index_direction = digits()[1].natural;
  switch (gesture) {
    case Gesture::kTakeoff: extended = {true, true, true, true, true}; break;
    case Gesture::kLand: break;
    case Gesture::kRight:
      extended[1] = true;
      index_direction = unit(1.0, 0.0);
      break;
    case Gesture::kLeft:
      extended[1] = true;
      index_direction = unit(-1.0, 0.0);
      break;
    case Gesture::kForward: extended[1] = extended[2] = true; break;
    case Gesture::kBackward: extended[0] = extended[4] = true; break;
  }
  for (std::size_t d = 0; d < digits().size(); ++d) {
    const Digit& digit = digits()[d];
    const Vec3 direction = d == 1 ? index_direction : digit.natural;
    place_digit(k, digit, extended[d] ? Pose::kExtended : Pose::kFolded, direction);
  }
  return k;
}

std::vector<GestureSample> synth_gesture_dataset(std::size_t n, std::uint64_t seed) {
  if (n < kGestureClasses) throw std::invalid_argument("dataset needs at least one sample per class");
  auto rng = make_rng(seed, kDataStream);
  std::normal_distribution<double> noise(0.0, kSynthNoiseSigma);

  std::array<HandKeypoints, kGestureClasses> templates;
  for (std::size_t c = 0; c < kGestureClasses; ++c) templates[c] = gesture_template(static_cast<Gesture>(c));

  std::vector<GestureSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GestureSample s;
    s.label = static_cast<int>(i % kGestureClasses);
    s.keypoints = templates[static_cast<std::size_t>(s.label)];
    for (double& v : s.keypoints) v += noise(rng);
    out.push_back(s);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

DatasetSplit stratified_split(const std::vector<GestureSample>& dataset, SplitRatios ratios,
                              std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be non-negative and sum to 1");
  }
  std::array<std::vector<std::size_t>, kGestureClasses> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset[i].label;
    if (label < 0 || label >= static_cast<int>(kGestureClasses)) {
      throw std::invalid_argument("gesture label out of range");
    }
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }

  auto rng = make_rng(seed, kSplitStream);
  DatasetSplit split;
  for (std::size_t c = 0; c < kGestureClasses; ++c) {
    auto& indices = by_class[c];
    if (indices.empty()) {
      throw std::invalid_argument("gesture class '" + std::string(to_string(static_cast<Gesture>(c))) +
                                  "' has no samples");
    }
    std::shuffle(indices.begin(), indices.end(), rng);
    const double n = static_cast<double>(indices.size());
    const auto train_end = static_cast<std::size_t>(std::lround(ratios.train * n));
    const auto val_end = std::max(train_end, static_cast<std::size_t>(std::lround((ratios.train + ratios.val) * n)));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      auto& bucket = k < train_end ? split.train : (k < val_end ? split.val : split.test);
      bucket.push_back(dataset[indices[k]]);
    }
  }
  return split;
}

MlpParams initial_params(std::uint64_t seed) {
  auto rng = make_rng(seed, kInitStream);
  MlpParams p;
  auto fill = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : w) v = dist(rng);
  };
  fill(p.w1, kKeypointDim, kHiddenUnits);
  fill(p.w2, kHiddenUnits, kGestureClasses);
  return p;
}

TrainResult train_on_split(const DatasetSplit& split, const TrainConfig& config) {
  if (split.train.empty()) throw std::invalid_argument("empty training set");
  if (config.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");

  TrainResult result;
  MlpParams params = initial_params(config.seed);
  result.params = params;

  auto evaluate_val = [&](const MlpParams& p) {
    if (split.val.empty()) return std::pair{0.0, 0.0};
    return std::pair{accuracy(p, split.val), mlp_loss(p, split.val)};
  };
  auto [best_acc, best_loss] = evaluate_val(params);

  auto rng = make_rng(config.seed, kShuffleStream);
  std::vector<GestureSample> order = split.train;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const auto step = mlp_loss_and_grad(params, std::span(order).subspan(start, len));
      if (!std::isfinite(step.loss)) throw TrainingError(epoch, "loss is not finite");
      params.add_scaled(step.grad, -config.learning_rate);
    }
    const double train_loss = mlp_loss(params, split.train);
    if (!std::isfinite(train_loss) || !params.all_finite()) {
      throw TrainingError(epoch, "training diverged");
    }
    result.metrics.loss_curve.push_back(train_loss);

    const auto [acc, loss] = evaluate_val(params);
    if (acc > best_acc || (acc == best_acc && loss < best_loss)) {
      best_acc = acc;
      best_loss = loss;
      result.params = params;
      result.metrics.best_epoch = epoch;
    }
  }

  result.metrics.train_accuracy = accuracy(result.params, split.train);
  result.metrics.val_accuracy = accuracy(result.params, split.val);
  result.metrics.test_accuracy = accuracy(result.params, split.test);
  return result;
}

TrainResult train_gestures(const std::vector<GestureSample>& dataset, const TrainConfig& config) {
  if (config.stratified) return train_on_split(stratified_split(dataset, config.ratios, config.seed), config);

  std::vector<GestureSample> shuffled = dataset;
  auto rng = make_rng(config.seed, kSplitStream);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const double n = static_cast<double>(shuffled.size());
  const auto train_end = static_cast<std::size_t>(std::lround(config.ratios.train * n));
  const auto val_end = static_cast<std::size_t>(std::lround((config.ratios.train + config.ratios.val) * n));
  DatasetSplit split;
  split.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(train_end));
  split.val.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(train_end),
                   shuffled.begin() + static_cast<std::ptrdiff_t>(val_end));
  split.test.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(val_end), shuffled.end());
  return train_on_split(split, config);
}

}  // namespace aerovis::vision
