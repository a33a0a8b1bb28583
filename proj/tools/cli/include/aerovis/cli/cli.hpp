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

#ifndef AEROVIS_CLI_CLI_HPP_
#define AEROVIS_CLI_CLI_HPP_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "aerovis/client/drone_client.hpp"
#include "aerovis/control/tracker.hpp"

namespace aerovis::gateway {
class Gateway;
class ClientBackend;
}  // namespace aerovis::gateway

namespace aerovis::sim {
class Simulator;
}

namespace aerovis::cli {

enum ExitCode : int { kExitOk = 0, kExitCommandError = 1, kExitUsage = 2 };

inline constexpr std::string_view kDefaultHost = "127.0.0.1";
inline constexpr std::uint16_t kDefaultPortsBase = 5550;

// Reads AEROVIS_LOG (error, info, debug) and routes logging to stderr.
void init_logging();

struct ReplResult {
  ExitCode status = kExitOk;
  std::string text;   // the response, without a trailing newline
  bool quit = false;
};

// Interactive command interpreter bound to one flight session.
class Repl {
 public:
  Repl();
  ~Repl();

  Repl(const Repl&) = delete;
  Repl& operator=(const Repl&) = delete;

  // Runs one command line. Never throws; errors become kExitCommandError,
  // malformed input kExitUsage with that verb's usage text.
  ReplResult execute(std::string_view line);

  // Feeds lines from `in` until EOF or quit, writing one response per line.
  void run(std::istream& in, std::ostream& out, bool prompt);

  client::DroneClient& client() noexcept { return client_; }
  control::VisionLoop* vision() noexcept { return vision_.get(); }

  // How long takeoff / land wait for their target state.
  std::chrono::milliseconds settle_timeout{8000};

 private:
  ReplResult dispatch(std::vector<std::string> tokens);
  void ensure_video();

  client::DroneClient client_;
  std::unique_ptr<control::VisionLoop> vision_;
  std::atomic<bool> video_connected_{false};
  std::unique_ptr<sim::Simulator> sim_;
  std::unique_ptr<gateway::ClientBackend> backend_;
  std::unique_ptr<gateway::Gateway> gateway_;
  std::atomic<gateway::Gateway*> frame_sink_{nullptr};
};

// Entry point behind the `aerovis` binary. Without arguments it runs the
// interactive loop on `in`.
int run_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace aerovis::cli

#endif  // AEROVIS_CLI_CLI_HPP_
