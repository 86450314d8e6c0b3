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

#include <chrono>
#include <exception>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "asmpc/dealer.hpp"
#include "asmpc/engine.hpp"
#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/oracle.hpp"
#include "asmpc/program.hpp"
#include "asmpc/sharing.hpp"
#include "asmpc/tcp.hpp"
#include "asmpc/transport.hpp"

namespace asmpc {

enum class TransportMode { kInProc, kTcp };

struct LocalRunOptions {
  TransportMode transport = TransportMode::kInProc;
  RandomnessPolicy masks;
  TolerancePolicy tol;
  ProductStrategy strategy = ProductStrategy::kRounds;
  std::uint64_t session = 1;
  /// Fresh triples and shares are drawn for each retry after
  /// NearZeroDenominator.
  int attempts = 3;
};

/// Both parties of one session, run in this process.
struct LocalRun {
  Plan plan;
  PartyResult p1;
  PartyResult p2;
  std::map<std::string, RealElement> revealed;
};

/// Secret-shares plaintext inputs per the program's input kinds.
inline std::pair<LocalValues, LocalValues> share_inputs(const ProtocolProgram& prog, const PlainEnvironment& env,
                                                         MaskSampler& rng) {
  LocalValues a, b;
  for (const auto& in : prog.inputs) {
    auto it = env.find(in.name);
    if (it == env.end()) fail(ErrorCode::kUsage, "input '" + in.name + "' is not bound");
    if (in.kind == ValueKind::kMultiplicative) {
      const auto s = share_multiplicative(it->second, rng);
      a[in.name] = {in.kind, s.share_p1};
      b[in.name] = {in.kind, s.share_p2};
    } else {
      const auto s = share_additive(it->second, rng);
      a[in.name] = {in.kind, s.share_p1};
      b[in.name] = {in.kind, s.share_p2};
    }
  }
  return {a, b};
}

/// Connected link pair for the chosen transport. TCP uses loopback on an
/// ephemeral port and performs the version handshake.
inline std::pair<std::unique_ptr<Link>, std::unique_ptr<Link>> make_link_pair(TransportMode mode,
                                                                                std::uint64_t session) {
  if (mode == TransportMode::kInProc) return make_inproc_pair();
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  const Endpoint peer{"127.0.0.1", listener.port()};
  std::unique_ptr<Link> p2;
  std::exception_ptr err;
  std::thread t([&] {
    try {
      p2 = tcp_connect(peer, std::chrono::seconds(10));
      handshake(*p2, session);
    } catch (...) {
      err = std::current_exception();
    }
  });
  std::unique_ptr<Link> p1;
  try {
    p1 = listener.accept(std::chrono::seconds(10));
    handshake(*p1, session);
  } catch (...) {
    t.join();
    throw;
  }
  t.join();
  if (err) std::rethrow_exception(err);
  return {std::move(p1), std::move(p2)};
}

/// Runs both parties over fresh triples and reveals every output.
inline LocalRun run_local(const ProtocolProgram& program, const PlainEnvironment& inputs,
                          const LocalRunOptions& opt = {}) {
  LocalRun out;
  out.plan = plan(program, opt.strategy);
  const std::uint64_t base_seed = opt.masks.seed ? *opt.masks.seed : std::random_device{}();
  for (int attempt = 0;; ++attempt) {
    RandomnessPolicy masks = opt.masks;
    masks.seed = attempt == 0 ? base_seed : derive_seed(base_seed, 1000 + static_cast<std::uint64_t>(attempt));
    MaskSampler share_rng(masks, /*stream=*/2);
    auto [in1, in2] = share_inputs(out.plan.program, inputs, share_rng);
    auto dealt = generate_triples(out.plan.standard, out.plan.resharing, masks, opt.session);
    TripleStore t1(std::move(dealt.p1)), t2(std::move(dealt.p2));
    auto links = make_link_pair(opt.transport, opt.session);
    Connection c1(std::move(links.first)), c2(std::move(links.second));
    Session s1(c1, opt.session, PartyId::kP1), s2(c2, opt.session, PartyId::kP2);
    PartyContext x1{PartyId::kP1, &t1, &s1, in1, opt.tol};
    PartyContext x2{PartyId::kP2, &t2, &s2, in2, opt.tol};
    std::exception_ptr e1, e2;
    std::map<std::string, RealElement> r1, r2;
    auto party = [&](PartyContext& ctx, PartyResult& res, std::map<std::string, RealElement>& rev,
                     std::exception_ptr& err) {
      try {
        res = execute(out.plan, ctx);
        rev = reveal_outputs(*ctx.session, out.plan.steps, res.outputs, out.plan.program.outputs);
      } catch (...) {
        err = std::current_exception();
      }
    };
    std::thread t(party, std::ref(x2), std::ref(out.p2), std::ref(r2), std::ref(e2));
    party(x1, out.p1, r1, e1);
    t.join();
    if (!e1 && !e2) {
      out.revealed = r1;
      return out;
    }
    // Prefer the error raised locally over the relayed copy.
    std::exception_ptr first = e1 ? e1 : e2;
    for (auto e : {e1, e2}) {
      if (!e) continue;
      try {
        std::rethrow_exception(e);
      } catch (const Error& err) {
        if (!err.remote()) first = e;
      } catch (...) {
        first = e;
      }
    }
    try {
      std::rethrow_exception(first);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNearZeroDenominator || attempt + 1 >= opt.attempts) throw;
    }
  }
}

}  // namespace asmpc
