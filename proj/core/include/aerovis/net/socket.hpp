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

// Thin RAII wrappers over IPv4 POSIX sockets. Every blocking call takes a
// timeout so that owning loops can poll their stop flags.

#ifndef AEROVIS_NET_SOCKET_HPP_
#define AEROVIS_NET_SOCKET_HPP_

#include <netinet/in.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aerovis/protocol/bytes.hpp"

namespace aerovis::net {

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Address {
  sockaddr_in raw{};

  static Address resolve(const std::string& host, std::uint16_t port);
  static Address any(std::uint16_t port);

  std::uint16_t port() const noexcept;
  std::string to_string() const;

  bool operator==(const Address& other) const noexcept;
};

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) noexcept : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(other.release()) {}
  Fd& operator=(Fd&& other) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept;
  void reset() noexcept;

 private:
  int fd_ = -1;
};

// Returns true when `fd` became readable (or errored) within `timeout`.
bool wait_readable(int fd, std::chrono::milliseconds timeout);

struct Datagram {
  Bytes data;
  Address from;
};

class UdpSocket {
 public:
  // Port 0 binds an ephemeral port. Throws NetError if the port is taken.
  static UdpSocket bind(std::uint16_t port, const std::string& host = "0.0.0.0");

  void send_to(const Address& to, ByteView data) const;
  std::optional<Datagram> receive(std::chrono::milliseconds timeout) const;
  std::uint16_t local_port() const;
  int native_handle() const noexcept { return fd_.get(); }

 private:
  explicit UdpSocket(Fd fd) : fd_(std::move(fd)) {}
  Fd fd_;
};

class TcpStream {
 public:
  static TcpStream connect(const Address& to, std::chrono::milliseconds timeout);

  // Returns false if the peer went away or stopped draining for `timeout`.
  bool write_all(ByteView data,
                 std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) const;
  // Reads up to buffer.size() bytes. nullopt on timeout, 0 on orderly close.
  std::optional<std::size_t> read_some(std::span<std::uint8_t> buffer,
                                       std::chrono::milliseconds timeout) const;
  void shutdown() const noexcept;
  int native_handle() const noexcept { return fd_.get(); }

 private:
  friend class TcpListener;
  explicit TcpStream(Fd fd) : fd_(std::move(fd)) {}
  Fd fd_;
};

class TcpListener {
 public:
  static TcpListener bind(std::uint16_t port, const std::string& host = "0.0.0.0");

  std::optional<TcpStream> accept(std::chrono::milliseconds timeout) const;
  std::uint16_t local_port() const;

 private:
  explicit TcpListener(Fd fd) : fd_(std::move(fd)) {}
  Fd fd_;
};

}  // namespace aerovis::net

#endif  // AEROVIS_NET_SOCKET_HPP_
