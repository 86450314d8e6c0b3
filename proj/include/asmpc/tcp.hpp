// Copyright 2026 The asmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/transport.hpp"

namespace asmpc {

inline constexpr std::uint16_t kDefaultPort = 7420;

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;

  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Accepts `host:port`, `host` or `:port`.
inline Endpoint parse_endpoint(const std::string& text, const std::string& default_host) {
  Endpoint ep;
  ep.host = default_host;
  const auto colon = text.rfind(':');
  const std::string host = colon == std::string::npos ? text : text.substr(0, colon);
  if (!host.empty()) ep.host = host;
  if (colon != std::string::npos) {
    const std::string port = text.substr(colon + 1);
    char* end = nullptr;
    const long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p < 0 || p > 65535) {
      fail(ErrorCode::kUsage, "bad port in endpoint '" + text + "'");
    }
    ep.port = static_cast<std::uint16_t>(p);
  }
  return ep;
}

/// Endpoint from an environment variable, or the fallback when unset.
inline Endpoint endpoint_from_env(const char* var, const std::string& fallback_host) {
  const char* v = std::getenv(var);
  if (v == nullptr || *v == '\0') return Endpoint{fallback_host, kDefaultPort};
  return parse_endpoint(v, fallback_host);
}

namespace detail {

inline std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) freeaddrinfo(head);
  }
};

inline void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(ep.port);
  const int rc = getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) {
    fail(ErrorCode::kTransportUnavailable, "cannot resolve " + ep.str() + ": " + gai_strerror(rc));
  }
}

inline bool wait_fd(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  while (true) {
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    return rc > 0;
  }
}

}  // namespace detail

class TcpLink final : public Link {
 public:
  explicit TcpLink(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpLink() override {
    close();
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const std::vector<std::uint8_t>& bytes) override {
    std::size_t off = 0;
    while (off < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) fail(ErrorCode::kPeerGone, "send failed: " + detail::errno_text());
      off += static_cast<std::size_t>(n);
    }
  }

  std::vector<std::uint8_t> recv() override {
    std::uint8_t len[4];
    read_exact(len, 4);
    const std::size_t n = (std::size_t{len[0]} << 24) | (std::size_t{len[1]} << 16) |
                          (std::size_t{len[2]} << 8) | std::size_t{len[3]};
    if (n < kFrameHeaderBytes || n > kMaxFrameBytes) {
      fail(ErrorCode::kProtocolDesync, "frame length " + std::to_string(n) + " out of range");
    }
    std::vector<std::uint8_t> body(n);
    read_exact(body.data(), n);
    return body;
  }

  void close() override {
    if (fd_ >= 0 && !shut_) {
      shut_ = true;
      ::shutdown(fd_, SHUT_RDWR);
    }
  }

 private:
  void read_exact(std::uint8_t* dst, std::size_t n) {
    std::size_t off = 0;
    while (off < n) {
      const ssize_t r = ::recv(fd_, dst + off, n - off, 0);
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) fail(ErrorCode::kPeerGone, "peer closed the connection");
      if (r < 0) fail(ErrorCode::kPeerGone, "recv failed: " + detail::errno_text());
      off += static_cast<std::size_t>(r);
    }
  }

  int fd_;
  bool shut_ = false;
};

/// Listening socket for P1. Port 0 picks an ephemeral port.
class TcpListener {
 public:
  explicit TcpListener(const Endpoint& bind_to) {
    detail::AddrInfo ai;
    detail::resolve(bind_to, true, ai);
    std::string last;
    for (auto* p = ai.head; p != nullptr; p = p->ai_next) {
      const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 4) == 0) {
        fd_ = fd;
        break;
      }
      last = detail::errno_text();
      ::close(fd);
    }
    if (fd_ < 0) fail(ErrorCode::kTransportUnavailable, "cannot listen on " + bind_to.str() + ": " + last);
  }
  ~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const {
    sockaddr_storage ss{};
    socklen_t len = sizeof(ss);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&ss), &len);
    if (ss.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
    return ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
  }

  std::unique_ptr<Link> accept(std::chrono::milliseconds timeout) {
    if (!detail::wait_fd(fd_, POLLIN, timeout)) {
      fail(ErrorCode::kTransportUnavailable, "timed out waiting for peer to connect");
    }
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) fail(ErrorCode::kTransportUnavailable, "accept failed: " + detail::errno_text());
    return std::make_unique<TcpLink>(fd);
  }

 private:
  int fd_ = -1;
};

/// Connects to P1, retrying refused attempts until the timeout elapses.
inline std::unique_ptr<Link> tcp_connect(const Endpoint& peer, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string last = "no address";
  while (true) {
    detail::AddrInfo ai;
    detail::resolve(peer, false, ai);
    for (auto* p = ai.head; p != nullptr; p = p->ai_next) {
      const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) return std::make_unique<TcpLink>(fd);
      last = detail::errno_text();
      ::close(fd);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      fail(ErrorCode::kTransportUnavailable, "cannot connect to " + peer.str() + ": " + last);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

/// Exchanges version and session id on a fresh link. Both sides send first,
/// then read, so the order of arrival does not matter.
inline void handshake(Link& link, std::uint64_t session, std::uint32_t version = kProtocolVersion) {
  const std::string hello = "hello asmpc/" + std::to_string(version) + " session=" + std::to_string(session);
  link.send(encode_frame(Frame::control(0, 0, hello)));
  const Frame f = decode_frame_body(link.recv());
  const std::string text = f.control_text();
  const std::string want_prefix = "hello asmpc/";
  if (f.tag != MsgTag::kControl || text.rfind(want_prefix, 0) != 0) {
    fail(ErrorCode::kTransportUnavailable, "peer did not send a hello");
  }
  const auto space = text.find(' ', want_prefix.size());
  const std::string peer_version = text.substr(want_prefix.size(), space - want_prefix.size());
  if (peer_version != std::to_string(version)) {
    fail(ErrorCode::kTransportUnavailable,
         "version mismatch: local " + std::to_string(version) + ", peer " + peer_version);
  }
  const std::string peer_session = space == std::string::npos ? "" : text.substr(space + 1);
  if (peer_session != "session=" + std::to_string(session)) {
    fail(ErrorCode::kTransportUnavailable, "session mismatch: peer sent '" + peer_session + "'");
  }
}

}  // namespace asmpc
