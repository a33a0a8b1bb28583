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

#include "aerovis/vision/gesture_mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aerovis::vision {
namespace {

struct Activations {
  std::array<double, kHiddenUnits> pre{};     // W1 k + b1
  std::array<double, kHiddenUnits> hidden{};  // leaky_relu(pre)
  ClassProbabilities logits{};
};

void check_params(const MlpParams& params) {
  if (!params.has_valid_shape()) throw std::invalid_argument("MLP parameters have the wrong shape");
}

void check_keypoints(std::span<const double> keypoints) {
  if (keypoints.size() != kKeypointDim) {
    throw std::invalid_argument("expected 63 keypoint values, got " + std::to_string(keypoints.size()));
  }
  if (!std::all_of(keypoints.begin(), keypoints.end(), [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("keypoints must be finite");
  }
}

Activations forward(const MlpParams& p, std::span<const double> k) {
  Activations a;
  for (std::size_t j = 0; j < kHiddenUnits; ++j) {
    double s = p.b1[j];
    const double* row = &p.w1[j * kKeypointDim];
    for (std::size_t i = 0; i < kKeypointDim; ++i) s += row[i] * k[i];
    a.pre[j] = s;
    a.hidden[j] = leaky_relu(s);
  }
  for (std::size_t c = 0; c < kGestureClasses; ++c) {
    double s = p.b2[c];
    const double* row = &p.w2[c * kHiddenUnits];
    for (std::size_t j = 0; j < kHiddenUnits; ++j) s += row[j] * a.hidden[j];
    a.logits[c] = s;
  }
  return a;
}

ClassProbabilities softmax(const ClassProbabilities& logits) {
  const double max = *std::max_element(logits.begin(), logits.end());
  ClassProbabilities p;
  double sum = 0.0;
  for (std::size_t c = 0; c < kGestureClasses; ++c) {
    p[c] = std::exp(logits[c] - max);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

// -log softmax(logits)[label], via log-sum-exp.
double cross_entropy(const ClassProbabilities& logits, int label) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max);
  return max + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

void check_label(int label) {
  if (label < 0 || label >= static_cast<int>(kGestureClasses)) {
    throw std::invalid_argument("gesture label out of range: " + std::to_string(label));
  }
}

}  // namespace

std::string_view to_string(Gesture g) noexcept {
  switch (g) {
    case Gesture::kTakeoff: return "takeoff";
    case Gesture::kLand: return "land";
    case Gesture::kRight: return "right";
    case Gesture::kLeft: return "left";
    case Gesture::kForward: return "forward";
    case Gesture::kBackward: return "backward";
  }
  return "?";
}

std::optional<Gesture> gesture_from_label(int label) noexcept {
  if (label < 0 || label >= static_cast<int>(kGestureClasses)) return std::nullopt;
  return static_cast<Gesture>(label);
}

bool MlpParams::has_valid_shape() const noexcept {
  return w1.size() == kHiddenUnits * kKeypointDim && b1.size() == kHiddenUnits &&
         w2.size() == kGestureClasses * kHiddenUnits && b2.size() == kGestureClasses;
}

bool MlpParams::all_finite() const noexcept {
  for (auto t : tensors()) {
    if (!std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); })) return false;
  }
  return true;
}

std::array<std::span<double>, 4> MlpParams::tensors() noexcept { return {w1, b1, w2, b2}; }

std::array<std::span<const double>, 4> MlpParams::tensors() const noexcept {
  return {w1, b1, w2, b2};
}

void MlpParams::add_scaled(const MlpParams& other, double scale) {
  auto dst = tensors();
  const auto src = other.tensors();
  for (std::size_t t = 0; t < dst.size(); ++t) {
    if (dst[t].size() != src[t].size()) throw std::invalid_argument("parameter shape mismatch");
    for (std::size_t i = 0; i < dst[t].size(); ++i) dst[t][i] += scale * src[t][i];
  }
}

ClassProbabilities mlp_forward(const MlpParams& params, std::span<const double> keypoints) {
  check_params(params);
  check_keypoints(keypoints);
  return softmax(forward(params, keypoints).logits);
}

LossAndGrad mlp_loss_and_grad(const MlpParams& params, std::span<const GestureSample> batch) {
  check_params(params);
  if (batch.empty()) throw std::invalid_argument("empty batch");

  LossAndGrad out;
  std::array<double, kHiddenUnits> d_hidden;
  for (const auto& sample : batch) {
    check_label(sample.label);
    check_keypoints(sample.keypoints);
    const Activations a = forward(params, sample.keypoints);
    out.loss += cross_entropy(a.logits, sample.label);

    // d loss / d logits = softmax - onehot
    ClassProbabilities d_logits = softmax(a.logits);
    d_logits[static_cast<std::size_t>(sample.label)] -= 1.0;

    d_hidden.fill(0.0);
    for (std::size_t c = 0; c < kGestureClasses; ++c) {
      const double g = d_logits[c];
      out.grad.b2[c] += g;
      double* grad_row = &out.grad.w2[c * kHiddenUnits];
      const double* w_row = &params.w2[c * kHiddenUnits];
      for (std::size_t j = 0; j < kHiddenUnits; ++j) {
        grad_row[j] += g * a.hidden[j];
        d_hidden[j] += g * w_row[j];
      }
    }
    for (std::size_t j = 0; j < kHiddenUnits; ++j) {
      const double d_pre = d_hidden[j] * (a.pre[j] >= 0.0 ? 1.0 : kLeakySlope);
      out.grad.b1[j] += d_pre;
      double* grad_row = &out.grad.w1[j * kKeypointDim];
      for (std::size_t i = 0; i < kKeypointDim; ++i) grad_row[i] += d_pre * sample.keypoints[i];
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (auto t : out.grad.tensors()) {
    for (double& v : t) v *= inv;
  }
  return out;
}

double mlp_loss(const MlpParams& params, std::span<const GestureSample> batch) {
  check_params(params);
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double loss = 0.0;
  for (const auto& sample : batch) {
    check_label(sample.label);
    check_keypoints(sample.keypoints);
    loss += cross_entropy(forward(params, sample.keypoints).logits, sample.label);
  }
  return loss / static_cast<double>(batch.size());
}

GesturePrediction predict_gesture(const MlpParams& params, std::span<const double> keypoints) {
  const ClassProbabilities p = mlp_forward(params, keypoints);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kGestureClasses; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return {static_cast<Gesture>(best), p[best]};
}

double accuracy(const MlpParams& params, std::span<const GestureSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    if (static_cast<int>(predict_gesture(params, s.keypoints).label) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace aerovis::vision
