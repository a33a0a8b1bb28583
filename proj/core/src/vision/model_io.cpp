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

#include "aerovis/vision/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace aerovis::vision {
namespace {

constexpr std::size_t kMagicSize = sizeof(kModelMagic) - 1;
constexpr std::size_t kPreambleSize = kMagicSize + 3 * 4;

std::size_t parameter_count() {
  return kHiddenUnits * kKeypointDim + kHiddenUnits + kGestureClasses * kHiddenUnits + kGestureClasses;
}

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ModelFormatError("dataset line " + std::to_string(line) + ": bad number '" +
                           std::string(text) + "'");
  }
  return v;
}

}  // namespace

Bytes serialize_model(const MlpParams& params) {
  if (!params.has_valid_shape()) throw ModelFormatError("parameters have the wrong shape");
  Bytes out(kModelMagic, kModelMagic + kMagicSize);
  out.reserve(kPreambleSize + parameter_count() * 8);
  protocol::le::put_u32(out, kKeypointDim);
  protocol::le::put_u32(out, kHiddenUnits);
  protocol::le::put_u32(out, kGestureClasses);
  for (auto tensor : params.tensors()) {
    for (double v : tensor) protocol::le::put_f64(out, v);
  }
  return out;
}

MlpParams deserialize_model(ByteView bytes) {
  if (bytes.size() < kPreambleSize || std::memcmp(bytes.data(), kModelMagic, kMagicSize) != 0) {
    throw ModelFormatError("not an AVMLP1 model file");
  }
  const auto in = protocol::le::get_u32(bytes, kMagicSize);
  const auto hidden = protocol::le::get_u32(bytes, kMagicSize + 4);
  const auto classes = protocol::le::get_u32(bytes, kMagicSize + 8);
  if (in != kKeypointDim || hidden != kHiddenUnits || classes != kGestureClasses) {
    throw ModelFormatError("unsupported model dimensions " + std::to_string(in) + "x" +
                           std::to_string(hidden) + "x" + std::to_string(classes));
  }
  if (bytes.size() != kPreambleSize + parameter_count() * 8) {
    throw ModelFormatError("model file has " + std::to_string(bytes.size()) + " bytes, expected " +
                           std::to_string(kPreambleSize + parameter_count() * 8));
  }
  MlpParams params;
  std::size_t at = kPreambleSize;
  for (auto tensor : params.tensors()) {
    for (double& v : tensor) {
      v = protocol::le::get_f64(bytes, at);
      at += 8;
    }
  }
  if (!params.all_finite()) throw ModelFormatError("model contains non-finite parameters");
  return params;
}

void save_model(const std::filesystem::path& path, const MlpParams& params) {
  const Bytes bytes = serialize_model(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFormatError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError("write to '" + path.string() + "' failed");
}

MlpParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open '" + path.string() + "'");
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

void write_dataset_csv(const std::filesystem::path& path, const std::vector<GestureSample>& samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ModelFormatError("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < kKeypointDim; ++i) out << 'k' << i << ',';
  out << "label\n";
  std::array<char, 32> buf;
  for (const auto& s : samples) {
    for (double v : s.keypoints) {
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out.write(buf.data(), end - buf.data());
      out << ',';
    }
    out << s.label << '\n';
  }
  if (!out) throw ModelFormatError("write to '" + path.string() + "' failed");
}

std::vector<GestureSample> read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open '" + path.string() + "'");
  std::vector<GestureSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("k0")) continue;

    GestureSample s;
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view token =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (field < kKeypointDim) {
        s.keypoints[field] = parse_double(token, line_no);
      } else if (field == kKeypointDim) {
        const double label = parse_double(token, line_no);
        if (label != std::floor(label) || label < 0 || label >= static_cast<double>(kGestureClasses)) {
          throw ModelFormatError("dataset line " + std::to_string(line_no) + ": bad label");
        }
        s.label = static_cast<int>(label);
      }
      ++field;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != kKeypointDim + 1) {
      throw ModelFormatError("dataset line " + std::to_string(line_no) + ": expected 64 columns, got " +
                             std::to_string(field));
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace aerovis::vision
