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

#ifndef AEROVIS_SIM_SIMULATOR_HPP_
#define AEROVIS_SIM_SIMULATOR_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "aerovis/net/socket.hpp"
#include "aerovis/sim/sim_core.hpp"

namespace aerovis::sim {

struct SimPorts {
  std::uint16_t command = protocol::kCommandPort;
  std::uint16_t navdata = protocol::kNavdataPort;
  std::uint16_t video = protocol::kVideoPort;

  // base + 6 / base + 4 / base + 5, so base 5550 gives the standard ports.
  static SimPorts from_base(std::uint16_t base);
};

inline constexpr std::uint16_t kDefaultPortsBase = 5550;

class SimStartupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CapturedCommand {
  std::chrono::steady_clock::time_point at;
  protocol::AtCommand command;
};

// Networked software drone. One loop owns the SimCore and advances it in
// real time; receiver threads hand parsed commands over through a queue.
class Simulator {
 public:
  // Binds all three ports before returning; throws SimStartupError if any
  // of them is taken.
  Simulator(SimConfig config, SimScene scene, SimPorts ports = {},
            const std::string& bind_host = "127.0.0.1");
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Idempotent. Closes the video stream, which ends the client's video loop.
  void stop();
  bool running() const noexcept { return !stopped_.load(); }

  const SimPorts& ports() const noexcept { return ports_; }

  // Runs `fn` on the core under the loop's lock.
  void with_core(const std::function<void(SimCore&)>& fn);
  SimDrone drone() const;

  // Every command accepted off the wire, with its arrival time.
  std::vector<CapturedCommand> captured_commands() const;
  void clear_captured_commands();
  std::uint64_t frames_sent() const noexcept { return frames_sent_.load(); }
  std::uint64_t navdata_sent() const noexcept { return navdata_sent_.load(); }
  std::uint64_t packets_after(std::chrono::steady_clock::time_point t) const;

 private:
  void command_loop(std::stop_token stop);
  void navdata_listen_loop(std::stop_token stop);
  void video_accept_loop(std::stop_token stop);
  void video_send_loop(std::stop_token stop);
  void physics_loop(std::stop_token stop);

  SimPorts ports_;
  mutable std::mutex core_mu_;
  SimCore core_;

  net::UdpSocket command_socket_;
  net::UdpSocket navdata_socket_;
  net::TcpListener video_listener_;

  mutable std::mutex queue_mu_;
  std::vector<protocol::AtCommand> queue_;
  std::vector<CapturedCommand> captured_;

  std::mutex navdata_peer_mu_;
  std::optional<net::Address> navdata_peer_;

  std::mutex video_mu_;
  std::condition_variable_any video_cv_;
  std::shared_ptr<net::TcpStream> video_stream_;
  std::optional<Bytes> pending_frame_;

  std::atomic<bool> stopped_{false};
  std::atomic<std::uint64_t> frames_sent_{0};
  std::atomic<std::uint64_t> navdata_sent_{0};

  std::vector<std::jthread> threads_;
};

}  // namespace aerovis::sim

#endif  // AEROVIS_SIM_SIMULATOR_HPP_
