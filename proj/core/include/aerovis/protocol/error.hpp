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

#ifndef AEROVIS_PROTOCOL_ERROR_HPP_
#define AEROVIS_PROTOCOL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace aerovis::protocol {

enum class ErrorCode {
  kInvalidInput,
  kEncoding,
  kSyntax,
  kMissingArgument,
  kBadSeq,
  kOutOfRange,
  kUnknownCommand,
  kNotNavdata,
  kIntegrity,
  kBounds,
  kNotVideoFrame,
  kFormat,
};

std::string_view to_string(ErrorCode code) noexcept;

// Raised by every encoder and parser in this module. `field()` names the
// offending element of the wire format ("seq", "roll", "header", ...).
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, std::string field, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace aerovis::protocol

#endif  // AEROVIS_PROTOCOL_ERROR_HPP_
