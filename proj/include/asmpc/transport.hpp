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

#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <exception>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/sharing.hpp"

namespace asmpc {

inline constexpr std::uint32_t kProtocolVersion = 1;

enum class MsgTag : std::uint8_t { kD = 1, kE = 2, kSign = 3, kShare = 4, kControl = 5 };

inline const char* tag_name(MsgTag t) {
  switch (t) {
    case MsgTag::kD: return "D";
    case MsgTag::kE: return "E";
    case MsgTag::kSign: return "SIGN";
    case MsgTag::kShare: return "SHARE";
    case MsgTag::kControl: return "CONTROL";
  }
  return "?";
}

inline bool is_scalar_tag(MsgTag t) {
  return t == MsgTag::kD || t == MsgTag::kE || t == MsgTag::kShare;
}

struct Frame {
  std::uint64_t session = 0;
  std::uint16_t step = 0;
  MsgTag tag = MsgTag::kControl;
  std::vector<std::uint8_t> payload;

  static Frame scalar(std::uint64_t session, std::uint16_t step, MsgTag tag, RealElement v) {
    Frame f{session, step, tag, std::vector<std::uint8_t>(8)};
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) f.payload[i] = static_cast<std::uint8_t>(bits >> (8 * i));
    return f;
  }

  static Frame sign(std::uint64_t session, std::uint16_t step, int s) {
    return {session, step, MsgTag::kSign, {static_cast<std::uint8_t>(static_cast<std::int8_t>(s))}};
  }

  static Frame control(std::uint64_t session, std::uint16_t step, const std::string& text) {
    return {session, step, MsgTag::kControl, std::vector<std::uint8_t>(text.begin(), text.end())};
  }

  RealElement scalar_value() const {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(payload.at(i)) << (8 * i);
    RealElement v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  int sign_value() const { return static_cast<std::int8_t>(payload.at(0)); }

  std::string control_text() const { return std::string(payload.begin(), payload.end()); }

  /// Information content counted by the accountant; framing is excluded.
  std::uint64_t logical_bits() const {
    if (is_scalar_tag(tag)) return kScalarBits;
    if (tag == MsgTag::kSign) return 1;
    return 0;
  }

  bool operator==(const Frame&) const = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 8 + 2 + 1;
inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

/// Wire encoding including the 4-byte big-endian length prefix.
inline std::vector<std::uint8_t> encode_frame(const Frame& f) {
  const std::size_t body = kFrameHeaderBytes + f.payload.size();
  std::vector<std::uint8_t> out;
  out.reserve(4 + body);
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(body >> (8 * i)));
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(f.session >> (8 * i)));
  out.push_back(static_cast<std::uint8_t>(f.step >> 8));
  out.push_back(static_cast<std::uint8_t>(f.step));
  out.push_back(static_cast<std::uint8_t>(f.tag));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

/// Decodes a frame body (everything after the length prefix).
inline Frame decode_frame_body(const std::vector<std::uint8_t>& body) {
  if (body.size() < kFrameHeaderBytes) fail(ErrorCode::kProtocolDesync, "short frame");
  Frame f;
  for (int i = 0; i < 8; ++i) f.session = (f.session << 8) | body[i];
  f.step = static_cast<std::uint16_t>((body[8] << 8) | body[9]);
  const std::uint8_t tag = body[10];
  if (tag < 1 || tag > 5) fail(ErrorCode::kProtocolDesync, "unknown tag " + std::to_string(tag));
  f.tag = static_cast<MsgTag>(tag);
  f.payload.assign(body.begin() + kFrameHeaderBytes, body.end());
  const std::size_t n = f.payload.size();
  if ((is_scalar_tag(f.tag) && n != 8) || (f.tag == MsgTag::kSign && n != 1)) {
    fail(ErrorCode::kProtocolDesync, std::string("bad payload length for ") + tag_name(f.tag));
  }
  return f;
}

/// Byte pipe carrying whole encoded frames between the two parties.
class Link {
 public:
  virtual ~Link() = default;
  /// Sends one encoded frame (length prefix included).
  virtual void send(const std::vector<std::uint8_t>& bytes) = 0;
  /// Blocks for the next frame body. Throws PeerGone once the peer closed.
  virtual std::vector<std::uint8_t> recv() = 0;
  virtual void close() = 0;
};

namespace detail {

struct InProcQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<std::uint8_t>> frames;
  bool closed = false;
};

class InProcLink final : public Link {
 public:
  InProcLink(std::shared_ptr<InProcQueue> out, std::shared_ptr<InProcQueue> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~InProcLink() override { close(); }

  void send(const std::vector<std::uint8_t>& bytes) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) fail(ErrorCode::kPeerGone, "in-process channel closed");
    out_->frames.emplace_back(bytes.begin() + 4, bytes.end());
    out_->cv.notify_all();
  }

  std::vector<std::uint8_t> recv() override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->frames.empty() || in_->closed; });
    if (in_->frames.empty()) fail(ErrorCode::kPeerGone, "in-process peer closed the channel");
    auto f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

  void close() override {
    for (auto* q : {out_.get(), in_.get()}) {
      std::lock_guard lock(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<InProcQueue> out_;
  std::shared_ptr<InProcQueue> in_;
};

}  // namespace detail

/// Two linked endpoints in one process: first for P1, second for P2.
inline std::pair<std::unique_ptr<Link>, std::unique_ptr<Link>> make_inproc_pair() {
  auto a = std::make_shared<detail::InProcQueue>();
  auto b = std::make_shared<detail::InProcQueue>();
  return {std::make_unique<detail::InProcLink>(a, b), std::make_unique<detail::InProcLink>(b, a)};
}

/// Session-multiplexed endpoint over one link. Any thread may call recv for
/// its own session; one caller at a time reads the link and parks frames
/// addressed to other sessions.
class Connection {
 public:
  explicit Connection(std::unique_ptr<Link> link) : link_(std::move(link)) {}
  ~Connection() { close(); }

  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  void send(const Frame& f) {
    const auto bytes = encode_frame(f);
    std::lock_guard lock(send_mu_);
    link_->send(bytes);
  }

  Frame recv(std::uint64_t session) {
    std::unique_lock lock(mu_);
    while (true) {
      auto& q = pending_[session];
      if (!q.empty()) {
        Frame f = std::move(q.front());
        q.pop_front();
        return f;
      }
      if (failure_) std::rethrow_exception(failure_);
      if (!reading_) {
        reading_ = true;
        lock.unlock();
        Frame f;
        std::exception_ptr err;
        try {
          f = decode_frame_body(link_->recv());
        } catch (...) {
          err = std::current_exception();
        }
        lock.lock();
        reading_ = false;
        if (err) {
          failure_ = err;
        } else {
          pending_[f.session].push_back(std::move(f));
        }
        cv_.notify_all();
        continue;
      }
      cv_.wait(lock);
    }
  }

  void close() {
    if (link_) link_->close();
  }

 private:
  std::unique_ptr<Link> link_;
  std::mutex send_mu_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool reading_ = false;
  std::map<std::uint64_t, std::deque<Frame>> pending_;
  std::exception_ptr failure_;
};

/// Op index carried by output-reveal frames; accounting skips them.
inline constexpr int kRevealOp = -2;

struct FrameRecord {
  PartyId from = PartyId::kP1;
  std::uint16_t step = 0;
  MsgTag tag = MsgTag::kD;
  /// Index of the program op the frame belongs to, or -1.
  int op = -1;
  std::vector<std::uint8_t> payload;

  std::uint64_t logical_bits() const { return Frame{0, step, tag, payload}.logical_bits(); }
  bool operator==(const FrameRecord&) const = default;
};

struct CostSummary {
  std::uint64_t rounds = 0;
  std::uint64_t bits_p1 = 0;
  std::uint64_t bits_p2 = 0;
  std::uint64_t bits_total = 0;

  bool operator==(const CostSummary&) const = default;
};

/// Data frames seen by one party in one session, in send/receive order.
/// CONTROL traffic is not recorded.
struct SessionTranscript {
  std::uint64_t session = 0;
  PartyId party = PartyId::kP1;
  std::vector<FrameRecord> frames;

  bool operator==(const SessionTranscript&) const = default;

  /// Text form: one line per frame, payload in hex.
  std::string serialize() const {
    std::ostringstream os;
    os << "session=" << session << " party=" << party_number(party) << '\n';
    static const char* hex = "0123456789abcdef";
    for (const auto& f : frames) {
      os << "from=" << party_number(f.from) << " step=" << f.step << " tag=" << tag_name(f.tag)
         << " op=" << f.op << " bits=" << f.logical_bits() << " payload=";
      for (auto b : f.payload) os << hex[b >> 4] << hex[b & 15];
      os << '\n';
    }
    return os.str();
  }
};

/// Inverse of SessionTranscript::serialize.
inline SessionTranscript parse_transcript(std::istream& is) {
  SessionTranscript t;
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kUsage, "transcript line " + std::to_string(lineno) + ": " + why);
  };
  auto field = [&](std::istringstream& ls, const char* key) {
    std::string tok;
    ls >> tok;
    const std::string prefix = std::string(key) + "=";
    if (tok.rfind(prefix, 0) != 0) bad(std::string("expected ") + key);
    return tok.substr(prefix.size());
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    try {
      if (lineno == 1) {
        t.session = std::stoull(field(ls, "session"));
        t.party = party_from_int(std::stol(field(ls, "party")));
        continue;
      }
      FrameRecord f;
      f.from = party_from_int(std::stol(field(ls, "from")));
      f.step = static_cast<std::uint16_t>(std::stoul(field(ls, "step")));
      const std::string tag = field(ls, "tag");
      bool known = false;
      for (auto c : {MsgTag::kD, MsgTag::kE, MsgTag::kSign, MsgTag::kShare, MsgTag::kControl}) {
        if (tag == tag_name(c)) {
          f.tag = c;
          known = true;
        }
      }
      if (!known) bad("unknown tag " + tag);
      f.op = std::stoi(field(ls, "op"));
      field(ls, "bits");
      const std::string hex = field(ls, "payload");
      if (hex.size() % 2) bad("odd payload length");
      for (std::size_t i = 0; i < hex.size(); i += 2) {
        f.payload.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
      }
      t.frames.push_back(std::move(f));
    } catch (const std::logic_error&) {
      bad("malformed number");
    }
  }
  if (lineno == 0) bad("empty transcript");
  return t;
}

namespace detail {

template <class Pred>
CostSummary account_if(const SessionTranscript& t, Pred pred) {
  CostSummary c;
  std::set<std::uint16_t> steps;
  for (const auto& f : t.frames) {
    if (f.op == kRevealOp || !pred(f)) continue;
    steps.insert(f.step);
    (f.from == PartyId::kP1 ? c.bits_p1 : c.bits_p2) += f.logical_bits();
  }
  c.rounds = steps.size();
  c.bits_total = c.bits_p1 + c.bits_p2;
  return c;
}

}  // namespace detail

/// Rounds are the distinct steps carrying data; both directions in one step
/// count once.
inline CostSummary account(const SessionTranscript& t) {
  return detail::account_if(t, [](const FrameRecord&) { return true; });
}

inline CostSummary account_op(const SessionTranscript& t, int op) {
  return detail::account_if(t, [op](const FrameRecord& f) { return f.op == op; });
}

/// One party's view of one session on a connection. Every receive names the
/// tag and step the local script expects; anything else is a desync.
class Session {
 public:
  Session(Connection& conn, std::uint64_t session_id, PartyId me)
      : conn_(conn), id_(session_id), me_(me) {
    transcript_.session = session_id;
    transcript_.party = me;
  }

  std::uint64_t id() const { return id_; }
  PartyId party() const { return me_; }
  const SessionTranscript& transcript() const { return transcript_; }

  void send_scalar(std::uint16_t step, MsgTag tag, RealElement v, int op = -1) {
    send_data(Frame::scalar(id_, step, tag, v), op);
  }

  void send_sign(std::uint16_t step, int s, int op = -1) { send_data(Frame::sign(id_, step, s), op); }

  RealElement recv_scalar(std::uint16_t step, MsgTag tag, int op = -1) {
    return recv_data(step, tag, op).scalar_value();
  }

  int recv_sign(std::uint16_t step, int op = -1) { return recv_data(step, MsgTag::kSign, op).sign_value(); }

  void send_control(std::uint16_t step, const std::string& text) {
    conn_.send(Frame::control(id_, step, text));
  }

  /// Next CONTROL frame; an abort notice is rethrown as the peer's error.
  std::string recv_control(std::uint16_t step) {
    Frame f = conn_.recv(id_);
    if (f.tag != MsgTag::kControl) {
      fail(ErrorCode::kProtocolDesync, std::string("expected CONTROL, got ") + tag_name(f.tag) +
                                           " at step " + std::to_string(f.step));
    }
    const std::string text = f.control_text();
    check_abort(text);
    if (f.step != step) {
      fail(ErrorCode::kProtocolDesync, "CONTROL at step " + std::to_string(f.step) + ", expected " +
                                           std::to_string(step));
    }
    return text;
  }

  /// Tells the peer this party is abandoning the session.
  void send_abort(const Error& e) noexcept {
    try {
      conn_.send(Frame::control(id_, 0xffff,
                                "abort " + std::to_string(static_cast<int>(e.code())) + " " + e.what()));
    } catch (...) {
    }
  }

 private:
  void send_data(const Frame& f, int op) {
    conn_.send(f);
    transcript_.frames.push_back({me_, f.step, f.tag, op, f.payload});
  }

  Frame recv_data(std::uint16_t step, MsgTag tag, int op) {
    Frame f = conn_.recv(id_);
    if (f.tag == MsgTag::kControl) {
      check_abort(f.control_text());
      fail(ErrorCode::kProtocolDesync, "unexpected CONTROL frame at step " + std::to_string(f.step));
    }
    if (f.tag != tag || f.step != step) {
      fail(ErrorCode::kProtocolDesync, std::string("expected ") + tag_name(tag) + "@" +
                                           std::to_string(step) + ", got " + tag_name(f.tag) + "@" +
                                           std::to_string(f.step));
    }
    transcript_.frames.push_back({peer_of(me_), f.step, f.tag, op, f.payload});
    return f;
  }

  static void check_abort(const std::string& text) {
    if (text.rfind("abort ", 0) != 0) return;
    std::istringstream is(text.substr(6));
    int code = 0;
    is >> code;
    std::string rest;
    std::getline(is, rest);
    auto ec = (code >= 1 && code <= static_cast<int>(ErrorCode::kTripleExhausted))
                  ? static_cast<ErrorCode>(code)
                  : ErrorCode::kProtocolDesync;
    throw Error(ec, "peer aborted:" + rest, /*remote=*/true);
  }

  Connection& conn_;
  std::uint64_t id_;
  PartyId me_;
  SessionTranscript transcript_;
};

}  // namespace asmpc
