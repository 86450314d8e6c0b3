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

#include <gtest/gtest.h>

#include <chrono>
#include <cstring>
#include <sstream>
#include <thread>

#include "asmpc/local.hpp"
#include "asmpc/tcp.hpp"
#include "asmpc/transport.hpp"
#include "test_util.hpp"

namespace asmpc {
namespace {

TEST(Frame, WireLayout) {
  const auto bytes = encode_frame(Frame::scalar(0x0102030405060708ULL, 0x0a0b, MsgTag::kE, 1.0));
  ASSERT_EQ(bytes.size(), 4u + 11u + 8u);
  const std::vector<std::uint8_t> head = {0, 0, 0, 19, 1, 2, 3, 4, 5, 6, 7, 8, 0x0a, 0x0b, 2};
  EXPECT_TRUE(std::equal(head.begin(), head.end(), bytes.begin()));
  // 1.0 little-endian: 00 .. 00 f0 3f
  EXPECT_EQ(bytes[4 + 11 + 6], 0xf0);
  EXPECT_EQ(bytes[4 + 11 + 7], 0x3f);
}

TEST(Frame, ScalarRoundTripBitExact) {
  for (double v : {0.1, -0.0, 5e-324, 1.7976931348623157e308, -123.456}) {
    const auto bytes = encode_frame(Frame::scalar(9, 3, MsgTag::kD, v));
    const Frame f = decode_frame_body({bytes.begin() + 4, bytes.end()});
    const double got = f.scalar_value();
    EXPECT_EQ(std::memcmp(&got, &v, 8), 0);
    EXPECT_EQ(f.logical_bits(), 64u);
  }
  const auto sign = encode_frame(Frame::sign(1, 1, -1));
  EXPECT_EQ(sign.size(), 4u + 11u + 1u);
  EXPECT_EQ(decode_frame_body({sign.begin() + 4, sign.end()}).sign_value(), -1);
  EXPECT_EQ(Frame::sign(1, 1, 1).logical_bits(), 1u);
}

TEST(Frame, MalformedPayloadIsDesync) {
  auto bytes = encode_frame(Frame::scalar(1, 1, MsgTag::kD, 1.0));
  bytes.pop_back();
  try {
    decode_frame_body({bytes.begin() + 4, bytes.end()});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolDesync);
  }
}

TEST(InProc, FifoThousandFrames) {
  auto [a, b] = make_inproc_pair();
  Connection ca(std::move(a)), cb(std::move(b));
  for (int i = 0; i < 1000; ++i) ca.send(Frame::scalar(4, static_cast<std::uint16_t>(i), MsgTag::kD, i * 0.5));
  for (int i = 0; i < 1000; ++i) {
    const Frame f = cb.recv(4);
    ASSERT_EQ(f.step, i);
    ASSERT_EQ(f.scalar_value(), i * 0.5);
  }
}

TEST(Session, DeliveryAndMismatch) {
  auto [a, b] = make_inproc_pair();
  Connection ca(std::move(a)), cb(std::move(b));
  Session s1(ca, 1, PartyId::kP1), s2(cb, 1, PartyId::kP2);
  s1.send_scalar(1, MsgTag::kD, 0.3);
  EXPECT_EQ(s2.recv_scalar(1, MsgTag::kD), 0.3);
  s1.send_scalar(1, MsgTag::kD, 0.4);
  try {
    s2.recv_scalar(1, MsgTag::kE);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolDesync);
  }
  s1.send_scalar(2, MsgTag::kD, 0.4);
  EXPECT_THROW(s2.recv_scalar(3, MsgTag::kD), Error);
}

TEST(Session, ClosedPeerIsPeerGone) {
  auto [a, b] = make_inproc_pair();
  Connection cb(std::move(b));
  a->close();
  Session s(cb, 1, PartyId::kP2);
  try {
    s.recv_scalar(1, MsgTag::kD);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPeerGone);
    EXPECT_EQ(exit_code(e.code()), 3);
  }
}

TEST(Session, AbortNoticeCarriesPeerError) {
  auto [a, b] = make_inproc_pair();
  Connection ca(std::move(a)), cb(std::move(b));
  Session s1(ca, 1, PartyId::kP1), s2(cb, 1, PartyId::kP2);
  s1.send_abort(Error(ErrorCode::kLogOfZero, "boom"));
  try {
    s2.recv_scalar(1, MsgTag::kD);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLogOfZero);
    EXPECT_TRUE(e.remote());
  }
}

TEST(Accounting, SimultaneousExchangeIsOneRound) {
  auto [a, b] = make_inproc_pair();
  Connection ca(std::move(a)), cb(std::move(b));
  Session s1(ca, 1, PartyId::kP1), s2(cb, 1, PartyId::kP2);
  s1.send_scalar(1, MsgTag::kD, 1.0);
  s2.send_scalar(1, MsgTag::kE, 2.0);
  s1.recv_scalar(1, MsgTag::kE);
  s2.recv_scalar(1, MsgTag::kD);
  const auto c = account(s1.transcript());
  EXPECT_EQ(c.rounds, 1u);
  EXPECT_EQ(c.bits_p1, 64u);
  EXPECT_EQ(c.bits_p2, 64u);
  EXPECT_EQ(account(s2.transcript()), c);
}

TEST(Accounting, TableExamples) {
  EXPECT_EQ(testing::cost_of("f = mul(x, y)", {{"x", 3}, {"y", 5}}), (CostSummary{1, 128, 128, 256}));
  EXPECT_EQ(testing::cost_of("u = addres(x)", {{"x", 6}}), (CostSummary{2, 64, 64, 128}));
  EXPECT_EQ(testing::cost_of("c = cmp(x, y)", {{"x", 5}, {"y", 3}}), (CostSummary{3, 65, 65, 130}));
}

TEST(Accounting, TranscriptTextRoundTrip) {
  LocalRunOptions opt;
  opt.masks.seed = 3;
  const auto run = run_local(parse_program("f = pre(x, alpha=3)"), {{"x", -1.5}}, opt);
  std::istringstream is(run.p2.transcript.serialize());
  EXPECT_EQ(parse_transcript(is), run.p2.transcript);
}

TEST(Tcp, LoopbackMatchesInProc) {
  LocalRunOptions opt;
  opt.masks.seed = 12;
  const auto prog = parse_program("f = mul(x, y)\ng = sin(x)\nh = div(x, y)");
  const auto a = run_local(prog, {{"x", 1.25}, {"y", -3}}, opt);
  opt.transport = TransportMode::kTcp;
  const auto b = run_local(prog, {{"x", 1.25}, {"y", -3}}, opt);
  EXPECT_EQ(a.p1.transcript, b.p1.transcript);
  EXPECT_EQ(a.p2.transcript, b.p2.transcript);
  EXPECT_EQ(a.revealed, b.revealed);
}

TEST(Tcp, VersionMismatchRejected) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  const Endpoint ep{"127.0.0.1", listener.port()};
  std::exception_ptr peer_err;
  std::thread t([&] {
    try {
      auto link = tcp_connect(ep, std::chrono::seconds(5));
      handshake(*link, 1, kProtocolVersion + 1);
    } catch (...) {
      peer_err = std::current_exception();
    }
  });
  auto link = listener.accept(std::chrono::seconds(5));
  try {
    handshake(*link, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportUnavailable);
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  t.join();
  EXPECT_TRUE(peer_err != nullptr);
}

TEST(Tcp, ConnectRefusedIsTransportUnavailable) {
  std::uint16_t port = 0;
  {
    TcpListener l(Endpoint{"127.0.0.1", 0});
    port = l.port();
  }
  try {
    tcp_connect(Endpoint{"127.0.0.1", port}, std::chrono::milliseconds(100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportUnavailable);
  }
}

TEST(Connection, ConcurrentSessionsInterleave) {
  // Two programs run at once over one connection pair, demultiplexed by
  // session id.
  auto [a, b] = make_inproc_pair();
  Connection ca(std::move(a)), cb(std::move(b));
  const Plan p = plan(parse_program("f = mul(x, y)\ng = pow(x, y, exps=[2, -1])\nh = cos(x)"));
  RandomnessPolicy masks;
  masks.seed = 21;
  MaskSampler rng(masks, 2);
  std::vector<std::thread> threads;
  std::vector<double> results(2);
  std::vector<std::string> errors(4);
  for (int s = 0; s < 2; ++s) {
    auto [in1, in2] = share_inputs(p.program, {{"x", 1.5 + s}, {"y", -2.0}}, rng);
    auto dealt = generate_triples(p.standard, p.resharing, masks, 100 + s);
    auto job = [&, s](PartyId id, LocalValues in, TripleSlice slice, Connection& c, int slot) {
      try {
        TripleStore store(std::move(slice));
        Session sess(c, 100 + s, id);
        PartyContext ctx{id, &store, &sess, in, {}};
        const auto r = execute(p, ctx);
        const auto rev = reveal_outputs(sess, p.steps, r.outputs, {"g"});
        if (id == PartyId::kP1) results[s] = rev.at("g");
      } catch (const std::exception& e) {
        errors[slot] = e.what();
      }
    };
    threads.emplace_back(job, PartyId::kP1, in1, dealt.p1, std::ref(ca), 2 * s);
    threads.emplace_back(job, PartyId::kP2, in2, dealt.p2, std::ref(cb), 2 * s + 1);
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) EXPECT_EQ(e, "");
  EXPECT_NEAR(results[0], 1.5 * 1.5 / -2.0, 1e-9);
  EXPECT_NEAR(results[1], 2.5 * 2.5 / -2.0, 1e-9);
}

}  // namespace
}  // namespace asmpc
