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

#include "aerovis/protocol/error.hpp"

#include <utility>

namespace aerovis::protocol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kEncoding: return "encoding error";
    case ErrorCode::kSyntax: return "malformed syntax";
    case ErrorCode::kMissingArgument: return "missing argument";
    case ErrorCode::kBadSeq: return "bad seq";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kUnknownCommand: return "unknown command";
    case ErrorCode::kNotNavdata: return "not navdata";
    case ErrorCode::kIntegrity: return "integrity error";
    case ErrorCode::kBounds: return "bounds error";
    case ErrorCode::kNotVideoFrame: return "not a video frame";
    case ErrorCode::kFormat: return "format error";
  }
  return "unknown error";
}

ProtocolError::ProtocolError(ErrorCode code, std::string field, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " [" + field + "]: " + message),
      code_(code),
      field_(std::move(field)) {}

}  // namespace aerovis::protocol
