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

#include "aerovis/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>

namespace aerovis::net {
namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw NetError(what + ": " + std::strerror(errno));
}

Fd make_socket(int type) {
  Fd fd(::socket(AF_INET, type | SOCK_CLOEXEC, 0));
  if (!fd.valid()) throw_errno("socket");
  return fd;
}

std::uint16_t bound_port(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw_errno("getsockname");
  return ntohs(addr.sin_port);
}

int poll_ms(std::chrono::milliseconds timeout) {
  return static_cast<int>(std::max<std::int64_t>(0, timeout.count()));
}

}  // namespace

Address Address::resolve(const std::string& host, std::uint16_t port) {
  Address a;
  a.raw.sin_family = AF_INET;
  a.raw.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &a.raw.sin_addr) == 1) return a;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* result = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || result == nullptr) {
    throw NetError("cannot resolve host '" + host + "'");
  }
  a.raw.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
  ::freeaddrinfo(result);
  return a;
}

Address Address::any(std::uint16_t port) {
  Address a;
  a.raw.sin_family = AF_INET;
  a.raw.sin_port = htons(port);
  a.raw.sin_addr.s_addr = htonl(INADDR_ANY);
  return a;
}

std::uint16_t Address::port() const noexcept { return ntohs(raw.sin_port); }

std::string Address::to_string() const {
  std::array<char, INET_ADDRSTRLEN> buf{};
  ::inet_ntop(AF_INET, &raw.sin_addr, buf.data(), buf.size());
  return std::string(buf.data()) + ":" + std::to_string(port());
}

bool Address::operator==(const Address& other) const noexcept {
  return raw.sin_addr.s_addr == other.raw.sin_addr.s_addr && raw.sin_port == other.raw.sin_port;
}

Fd& Fd::operator=(Fd&& other) noexcept {
  if (this != &other) {
    reset();
    fd_ = other.release();
  }
  return *this;
}

int Fd::release() noexcept {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

void Fd::reset() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

bool wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd p{fd, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&p, 1, poll_ms(timeout));
  } while (rc < 0 && errno == EINTR);
  return rc > 0;
}

UdpSocket UdpSocket::bind(std::uint16_t port, const std::string& host) {
  Fd fd = make_socket(SOCK_DGRAM);
  const Address addr = host == "0.0.0.0" ? Address::any(port) : Address::resolve(host, port);
  if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr.raw), sizeof(addr.raw)) != 0) {
    throw_errno("bind udp " + addr.to_string());
  }
  return UdpSocket(std::move(fd));
}

void UdpSocket::send_to(const Address& to, ByteView data) const {
  // Datagram loss is part of the transport contract; errors such as
  // ECONNREFUSED from a dead peer are not fatal to the caller.
  ::sendto(fd_.get(), data.data(), data.size(), MSG_NOSIGNAL,
           reinterpret_cast<const sockaddr*>(&to.raw), sizeof(to.raw));
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout) const {
  if (!wait_readable(fd_.get(), timeout)) return std::nullopt;
  std::array<std::uint8_t, 65536> buf;
  Datagram dg;
  socklen_t len = sizeof(dg.from.raw);
  const ssize_t n = ::recvfrom(fd_.get(), buf.data(), buf.size(), MSG_DONTWAIT,
                               reinterpret_cast<sockaddr*>(&dg.from.raw), &len);
  if (n < 0) return std::nullopt;
  dg.data.assign(buf.begin(), buf.begin() + n);
  return dg;
}

std::uint16_t UdpSocket::local_port() const { return bound_port(fd_.get()); }

TcpStream TcpStream::connect(const Address& to, std::chrono::milliseconds timeout) {
  Fd fd = make_socket(SOCK_STREAM);
  const int flags = ::fcntl(fd.get(), F_GETFL, 0);
  ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
  if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&to.raw), sizeof(to.raw)) != 0) {
    if (errno != EINPROGRESS) throw_errno("connect " + to.to_string());
    pollfd p{fd.get(), POLLOUT, 0};
    if (::poll(&p, 1, poll_ms(timeout)) <= 0) throw NetError("connect " + to.to_string() + ": timed out");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      errno = err;
      throw_errno("connect " + to.to_string());
    }
  }
  ::fcntl(fd.get(), F_SETFL, flags);
  const int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return TcpStream(std::move(fd));
}

bool TcpStream::write_all(ByteView data, std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_.get(), data.data() + sent, data.size() - sent,
                             MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno != EAGAIN && errno != EWOULDBLOCK) return false;
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return false;
      pollfd p{fd_.get(), POLLOUT, 0};
      if (::poll(&p, 1, poll_ms(left)) < 0 && errno != EINTR) return false;
      if (p.revents & (POLLERR | POLLHUP)) return false;
      continue;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<std::size_t> TcpStream::read_some(std::span<std::uint8_t> buffer,
                                                std::chrono::milliseconds timeout) const {
  if (!wait_readable(fd_.get(), timeout)) return std::nullopt;
  const ssize_t n = ::recv(fd_.get(), buffer.data(), buffer.size(), MSG_DONTWAIT);
  if (n < 0) {
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
    return 0;
  }
  return static_cast<std::size_t>(n);
}

void TcpStream::shutdown() const noexcept { ::shutdown(fd_.get(), SHUT_RDWR); }

TcpListener TcpListener::bind(std::uint16_t port, const std::string& host) {
  Fd fd = make_socket(SOCK_STREAM);
  const int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const Address addr = host == "0.0.0.0" ? Address::any(port) : Address::resolve(host, port);
  if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr.raw), sizeof(addr.raw)) != 0) {
    throw_errno("bind tcp " + addr.to_string());
  }
  if (::listen(fd.get(), 4) != 0) throw_errno("listen");
  return TcpListener(std::move(fd));
}

std::optional<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) const {
  if (!wait_readable(fd_.get(), timeout)) return std::nullopt;
  Fd fd(::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK));
  if (!fd.valid()) return std::nullopt;
  const int flags = ::fcntl(fd.get(), F_GETFL, 0);
  ::fcntl(fd.get(), F_SETFL, flags & ~O_NONBLOCK);
  const int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return TcpStream(std::move(fd));
}

std::uint16_t TcpListener::local_port() const { return bound_port(fd_.get()); }

}  // namespace aerovis::net
