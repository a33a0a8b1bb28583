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

#include "aerovis/protocol/at_command.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "aerovis/protocol/error.hpp"

namespace aerovis::protocol {
namespace {

constexpr std::array<std::pair<CommandKind, std::string_view>, 6> kNames = {{
    {CommandKind::kRef, "REF"},
    {CommandKind::kPcmd, "PCMD"},
    {CommandKind::kFtrim, "FTRIM"},
    {CommandKind::kConfig, "CONFIG"},
    {CommandKind::kComwdg, "COMWDG"},
    {CommandKind::kCtrl, "CTRL"},
}};

[[noreturn]] void fail(ErrorCode code, std::string field, const std::string& message) {
  throw ProtocolError(code, std::move(field), message);
}

bool valid_config_text(std::string_view text) {
  return text.find('"') == std::string_view::npos && text.find('\r') == std::string_view::npos;
}

float clamp_stick(float v) { return std::clamp(v, -1.0f, 1.0f); }

void append_int(std::string& out, long long v) {
  std::array<char, 24> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), end);
}

// Splits the text after '=' on commas that are not inside double quotes.
std::vector<std::string_view> split_args(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '"') {
      quoted = !quoted;
    } else if (text[i] == ',' && !quoted) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (quoted) fail(ErrorCode::kSyntax, "args", "unterminated quoted string");
  out.push_back(text.substr(start));
  return out;
}

template <typename Int>
Int parse_integer(std::string_view token, const char* field) {
  Int value{};
  if (token.empty()) fail(ErrorCode::kMissingArgument, field, "missing argument");
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec == std::errc::result_out_of_range) {
    fail(ErrorCode::kOutOfRange, field, "integer out of range: " + std::string(token));
  }
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(ErrorCode::kSyntax, field, "not an integer: " + std::string(token));
  }
  return value;
}

float parse_stick(std::string_view token, const char* field) {
  const float v = decode_float_arg(parse_integer<std::int32_t>(token, field));
  if (!std::isfinite(v) || v < -1.0f || v > 1.0f) {
    fail(ErrorCode::kOutOfRange, field, "stick value outside [-1, 1]");
  }
  return v;
}

std::string parse_quoted(std::string_view token, const char* field) {
  if (token.empty()) fail(ErrorCode::kMissingArgument, field, "missing argument");
  if (token.size() < 2 || token.front() != '"' || token.back() != '"') {
    fail(ErrorCode::kSyntax, field, "expected a quoted string");
  }
  std::string_view inner = token.substr(1, token.size() - 2);
  if (!valid_config_text(inner)) fail(ErrorCode::kSyntax, field, "illegal character in string");
  return std::string(inner);
}

std::size_t expected_arg_count(CommandKind kind) {
  switch (kind) {
    case CommandKind::kRef: return 1;
    case CommandKind::kPcmd: return 5;
    case CommandKind::kConfig: return 2;
    default: return 0;
  }
}

}  // namespace

std::string_view command_name(CommandKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<CommandKind> command_kind_from_name(std::string_view name) noexcept {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::int32_t encode_float_arg(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::kInvalidInput, "float", "non-finite float argument");
  return std::bit_cast<std::int32_t>(static_cast<float>(v));
}

float decode_float_arg(std::int32_t encoded) noexcept { return std::bit_cast<float>(encoded); }

std::string encode_at(const AtCommand& cmd) {
  if (cmd.seq == 0) fail(ErrorCode::kEncoding, "seq", "sequence number must be >= 1");

  std::string line = "AT*";
  line += command_name(cmd.kind);
  line += '=';
  append_int(line, cmd.seq);

  auto require = [&](bool ok) {
    if (!ok) fail(ErrorCode::kEncoding, "args", "arguments do not match command kind");
  };

  switch (cmd.kind) {
    case CommandKind::kRef: {
      const auto* bits = std::get_if<RefBits>(&cmd.args);
      require(bits != nullptr);
      line += ',';
      append_int(line, static_cast<std::int32_t>(bits->value()));
      break;
    }
    case CommandKind::kPcmd: {
      const auto* p = std::get_if<PcmdArgs>(&cmd.args);
      require(p != nullptr);
      line += p->progressive ? ",1" : ",0";
      for (float stick : {p->roll, p->pitch, p->gaz, p->yaw}) {
        line += ',';
        append_int(line, encode_float_arg(clamp_stick(stick)));
      }
      break;
    }
    case CommandKind::kConfig: {
      const auto* c = std::get_if<ConfigArgs>(&cmd.args);
      require(c != nullptr);
      if (!valid_config_text(c->key) || !valid_config_text(c->value)) {
        fail(ErrorCode::kEncoding, "config", "key/value may not contain '\"' or '\\r'");
      }
      line += ",\"" + c->key + "\",\"" + c->value + "\"";
      break;
    }
    case CommandKind::kFtrim:
    case CommandKind::kComwdg:
    case CommandKind::kCtrl:
      require(std::holds_alternative<std::monostate>(cmd.args));
      break;
  }

  line += '\r';
  if (line.size() > kMaxAtLineLength) {
    fail(ErrorCode::kEncoding, "line", "encoded line exceeds 1024 bytes");
  }
  return line;
}

AtCommand parse_at(std::string_view line) {
  if (line.size() > kMaxAtLineLength) fail(ErrorCode::kSyntax, "line", "line exceeds 1024 bytes");
  if (line.empty() || line.back() != '\r') {
    fail(ErrorCode::kSyntax, "terminator", "line must end with a carriage return");
  }
  line.remove_suffix(1);
  if (line.find('\r') != std::string_view::npos) {
    fail(ErrorCode::kSyntax, "terminator", "embedded carriage return");
  }
  if (!line.starts_with("AT*")) fail(ErrorCode::kSyntax, "prefix", "expected 'AT*'");
  line.remove_prefix(3);

  const auto eq = line.find('=');
  if (eq == std::string_view::npos) fail(ErrorCode::kSyntax, "name", "expected '=' after name");
  const std::string_view name = line.substr(0, eq);
  const auto kind = command_kind_from_name(name);
  if (!kind) fail(ErrorCode::kUnknownCommand, "name", "unknown command '" + std::string(name) + "'");

  const auto tokens = split_args(line.substr(eq + 1));
  AtCommand cmd;
  cmd.kind = *kind;

  const std::string_view seq_token = tokens.front();
  if (seq_token.empty()) fail(ErrorCode::kBadSeq, "seq", "missing sequence number");
  if (!std::all_of(seq_token.begin(), seq_token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    fail(ErrorCode::kBadSeq, "seq", "sequence number must be decimal digits");
  }
  std::uint32_t seq = 0;
  auto [ptr, ec] = std::from_chars(seq_token.data(), seq_token.data() + seq_token.size(), seq);
  if (ec != std::errc() || seq == 0) fail(ErrorCode::kBadSeq, "seq", "sequence number out of range");
  cmd.seq = seq;

  const std::size_t argc = tokens.size() - 1;
  const std::size_t expected = expected_arg_count(*kind);
  if (argc < expected) fail(ErrorCode::kMissingArgument, "args", "missing argument");
  if (argc > expected) fail(ErrorCode::kSyntax, "args", "unexpected argument");

  switch (*kind) {
    case CommandKind::kRef: {
      const auto raw = static_cast<std::uint32_t>(parse_integer<std::int32_t>(tokens[1], "ref"));
      if ((raw & kRefBaseMask) != kRefBaseMask ||
          (raw & ~(kRefBaseMask | kRefTakeoffBit | kRefEmergencyBit)) != 0) {
        fail(ErrorCode::kOutOfRange, "ref", "REF value has unexpected bits");
      }
      cmd.args = RefBits{(raw & kRefTakeoffBit) != 0, (raw & kRefEmergencyBit) != 0};
      break;
    }
    case CommandKind::kPcmd: {
      const auto flag = parse_integer<std::int32_t>(tokens[1], "progressive");
      if (flag != 0 && flag != 1) fail(ErrorCode::kOutOfRange, "progressive", "flag must be 0 or 1");
      PcmdArgs p;
      p.progressive = flag == 1;
      p.roll = parse_stick(tokens[2], "roll");
      p.pitch = parse_stick(tokens[3], "pitch");
      p.gaz = parse_stick(tokens[4], "gaz");
      p.yaw = parse_stick(tokens[5], "yaw");
      cmd.args = p;
      break;
    }
    case CommandKind::kConfig:
      cmd.args = ConfigArgs{parse_quoted(tokens[1], "key"), parse_quoted(tokens[2], "value")};
      break;
    default:
      break;
  }
  return cmd;
}

std::vector<std::string_view> split_at_datagram(std::string_view datagram) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < datagram.size()) {
    const auto cr = datagram.find('\r', start);
    if (cr == std::string_view::npos) {
      lines.push_back(datagram.substr(start));
      break;
    }
    lines.push_back(datagram.substr(start, cr - start + 1));
    start = cr + 1;
  }
  return lines;
}

}  // namespace aerovis::protocol
