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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmpc/dealer.hpp"
#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/program.hpp"
#include "asmpc/protocols.hpp"
#include "asmpc/sharing.hpp"
#include "asmpc/transport.hpp"

namespace asmpc {

enum class KernelKind : std::uint8_t {
  // Communicating.
  kBeaverMul,
  kMulRes,
  kAddRes,
  kSignReveal,
  // Local.
  kLinear,
  kExpShares,
  kLogShares,
  kPowShares,
  kAbsPowShares,
  kTrigShares,
  kSignCorrect,
  kExpSelect,
};

inline int kernel_rounds(KernelKind k) {
  switch (k) {
    case KernelKind::kBeaverMul:
    case KernelKind::kMulRes:
    case KernelKind::kSignReveal:
      return 1;
    case KernelKind::kAddRes:
      return 2;
    default:
      return 0;
  }
}

/// One primitive step of a lowered op. Communicating kernels occupy steps
/// start+1 .. end; local kernels run once their step `end` has completed.
struct Kernel {
  KernelKind kind = KernelKind::kLinear;
  int op = -1;
  std::vector<int> in;
  std::vector<int> out;
  std::vector<int> after;
  std::vector<double> coeffs;
  double bias = 0.0;
  double base = std::numbers::e;
  double alpha = 1.0;
  /// Exponents for kPowShares: one row per output, one entry per input.
  std::vector<std::vector<long>> exps;
  /// Sine for kTrigShares; zero-tolerant for kLogShares.
  bool flag = false;
  int start = 0;
  int end = 0;
};

struct Slot {
  std::string name;
  ValueKind kind = ValueKind::kAdditive;
};

/// Scheduling summary of one program node.
struct OpSchedule {
  std::string out;
  OpKind op = OpKind::kLinear;
  std::size_t n = 0;
  bool tree = false;
  bool positive = false;
  int order = 0;
  int first_step = 0;
  int last_step = 0;
  std::size_t standard = 0;
  std::size_t resharing = 0;
};

struct Plan {
  ProtocolProgram program;
  ProductStrategy default_strategy = ProductStrategy::kRounds;
  std::vector<Slot> slots;
  std::vector<Kernel> kernels;
  std::map<std::string, int> named;
  std::vector<OpSchedule> ops;
  int steps = 0;
  std::size_t standard = 0;
  std::size_t resharing = 0;
  std::uint64_t digest = 0;

  std::string summary() const {
    return "steps=" + std::to_string(steps) + " standard=" + std::to_string(standard) +
           " resharing=" + std::to_string(resharing);
  }
};

namespace detail {

class Lowering {
 public:
  Lowering(Plan& plan) : p_(plan) {}

  int slot(ValueKind kind, const std::string& name = {}) {
    p_.slots.push_back({name.empty() ? "%" + std::to_string(p_.slots.size()) : name, kind});
    return static_cast<int>(p_.slots.size()) - 1;
  }

  int emit(Kernel k) {
    k.op = op_;
    p_.kernels.push_back(std::move(k));
    return static_cast<int>(p_.kernels.size()) - 1;
  }

  int linear(std::vector<int> xs, std::vector<double> coeffs, double bias) {
    const int o = slot(ValueKind::kAdditive);
    Kernel k;
    k.kind = KernelKind::kLinear;
    k.in = std::move(xs);
    k.out = {o};
    k.coeffs = std::move(coeffs);
    k.bias = bias;
    emit(std::move(k));
    return o;
  }

  int unary(KernelKind kind, int in, ValueKind out_kind) {
    const int o = slot(out_kind);
    Kernel k;
    k.kind = kind;
    k.in = {in};
    k.out = {o};
    emit(std::move(k));
    return o;
  }

  int beaver(int x, int y) {
    const int o = slot(ValueKind::kAdditive);
    Kernel k;
    k.kind = KernelKind::kBeaverMul;
    k.in = {x, y};
    k.out = {o};
    last_ = emit(std::move(k));
    return o;
  }

  int mulres(int u) {
    const int o = unary(KernelKind::kMulRes, u, ValueKind::kAdditive);
    last_ = static_cast<int>(p_.kernels.size()) - 1;
    return o;
  }

  int addres(int x) { return unary(KernelKind::kAddRes, x, ValueKind::kMultiplicative); }

  int sign_reveal(int u, std::vector<int> after) {
    const int o = slot(ValueKind::kPublic);
    Kernel k;
    k.kind = KernelKind::kSignReveal;
    k.in = {u};
    k.out = {o};
    k.after = std::move(after);
    emit(std::move(k));
    return o;
  }

  /// n parallel additive resharings, local powers, one resharing back.
  int power(const std::vector<int>& xs, const std::vector<long>& exps) {
    std::vector<int> us;
    for (int x : xs) us.push_back(addres(x));
    const int v = slot(ValueKind::kMultiplicative);
    Kernel k;
    k.kind = KernelKind::kPowShares;
    k.in = us;
    k.out = {v};
    k.exps = {exps};
    emit(std::move(k));
    return mulres(v);
  }

  std::pair<int, int> trig_pair(int x, bool sine) {
    const int m = slot(ValueKind::kMultiplicative);
    const int n = slot(ValueKind::kMultiplicative);
    Kernel k;
    k.kind = KernelKind::kTrigShares;
    k.in = {x};
    k.out = {m, n};
    k.flag = sine;
    emit(std::move(k));
    return {mulres(m), mulres(n)};
  }

  int sine(int x) {
    auto [fm, fn] = trig_pair(x, true);
    return linear({fm, fn}, {1.0, 1.0}, 0.0);
  }

  int cosine(int x) {
    auto [fm, fn] = trig_pair(x, false);
    return linear({fn, fm}, {1.0, -1.0}, 0.0);
  }

  /// Series sum_k scale*c_k x^{2k+1} + bias: one resharing of x, local odd
  /// powers, `order` parallel resharings back.
  int arcsin(int x, int order, double scale, double bias) {
    const int u = addres(x);
    Kernel k;
    k.kind = KernelKind::kPowShares;
    k.in = {u};
    for (int i = 0; i < order; ++i) {
      k.out.push_back(slot(ValueKind::kMultiplicative));
      k.exps.push_back({2L * i + 1});
    }
    const auto powers = k.out;
    emit(std::move(k));
    std::vector<int> terms;
    for (int v : powers) terms.push_back(mulres(v));
    auto c = protocols::asin_coefficients(order);
    for (auto& ci : c) ci *= scale;
    return linear(terms, c, bias);
  }

  /// |x|^alpha with optional sign correction from a revealed sign.
  int real_power(int x, double alpha, bool positive) {
    const int u = addres(x);
    const int v = slot(ValueKind::kMultiplicative);
    Kernel k;
    k.kind = KernelKind::kAbsPowShares;
    k.in = {u};
    k.out = {v};
    k.alpha = alpha;
    emit(std::move(k));
    const int f = mulres(v);
    if (positive) return f;
    const int s = sign_reveal(u, {last_});
    const int o = slot(ValueKind::kAdditive);
    Kernel c;
    c.kind = KernelKind::kSignCorrect;
    c.in = {f, s};
    c.out = {o};
    c.alpha = alpha;
    emit(std::move(c));
    return o;
  }

  int secret_power(int x, int y) {
    const int u = addres(x);
    const int t = slot(ValueKind::kAdditive);
    Kernel lg;
    lg.kind = KernelKind::kLogShares;
    lg.in = {u};
    lg.out = {t};
    lg.flag = true;
    emit(std::move(lg));
    const int s = beaver(t, y);
    const int sign = sign_reveal(u, {last_});
    const int v = slot(ValueKind::kMultiplicative);
    Kernel k;
    k.kind = KernelKind::kExpSelect;
    k.in = {s, y, sign};
    k.out = {v};
    emit(std::move(k));
    return mulres(v);
  }

  int product_tree(std::vector<int> xs) {
    while (xs.size() > 1) {
      std::vector<int> next;
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(beaver(xs[i], xs[i + 1]));
      if (xs.size() % 2 == 1) next.push_back(xs.back());
      xs = std::move(next);
    }
    return xs[0];
  }

  void lower_node(int index, const ProgramNode& n, OpSchedule& sched) {
    op_ = index;
    std::vector<int> a;
    for (const auto& r : n.args) a.push_back(p_.named.at(r));
    const auto& prm = n.params;
    int out = -1;
    switch (n.op) {
      case OpKind::kLinear: out = linear(a, prm.coeffs, prm.bias); break;
      case OpKind::kMul: out = beaver(a[0], a[1]); break;
      case OpKind::kMulRes: out = mulres(a[0]); break;
      case OpKind::kAddRes: out = addres(a[0]); break;
      case OpKind::kCmp: {
        const int diff = linear({a[0], a[1]}, {1.0, -1.0}, 0.0);
        out = sign_reveal(addres(diff), {});
        break;
      }
      case OpKind::kExp: {
        const int u = unary(KernelKind::kExpShares, a[0], ValueKind::kMultiplicative);
        p_.kernels.back().base = prm.base;
        out = mulres(u);
        break;
      }
      case OpKind::kLog: {
        const int u = addres(a[0]);
        out = unary(KernelKind::kLogShares, u, ValueKind::kAdditive);
        p_.kernels.back().base = prm.base;
        break;
      }
      case OpKind::kPow: out = power(a, prm.exps); break;
      case OpKind::kDiv: out = power(a, {1, -1}); break;
      case OpKind::kProd:
        sched.tree = product_uses_tree(prm.strategy, a.size(), p_.default_strategy);
        out = sched.tree ? product_tree(a) : power(a, std::vector<long>(a.size(), 1));
        break;
      case OpKind::kSin: out = sine(a[0]); break;
      case OpKind::kCos: out = cosine(a[0]); break;
      case OpKind::kTan: {
        const int s = sine(a[0]);
        out = power({s, cosine(a[0])}, {1, -1});
        break;
      }
      case OpKind::kCot: {
        const int s = sine(a[0]);
        out = power({cosine(a[0]), s}, {1, -1});
        break;
      }
      case OpKind::kSec: out = power({cosine(a[0])}, {-1}); break;
      case OpKind::kCsc: out = power({sine(a[0])}, {-1}); break;
      case OpKind::kAsin: out = arcsin(a[0], prm.order, 1.0, 0.0); break;
      case OpKind::kAcos: out = arcsin(a[0], prm.order, -1.0, std::numbers::pi / 2); break;
      case OpKind::kAtan: {
        // atan x = asin(x / sqrt(1 + x^2)).
        const int w = linear({beaver(a[0], a[0])}, {1.0}, 1.0);
        const int r = real_power(w, -0.5, true);
        out = arcsin(beaver(a[0], r), prm.order, 1.0, 0.0);
        break;
      }
      case OpKind::kPre: out = real_power(a[0], prm.alpha, prm.positive); break;
      case OpKind::kPse: out = secret_power(a[0], a[1]); break;
    }
    p_.slots[out].name = n.out;
    p_.named[n.out] = out;
  }

 private:
  Plan& p_;
  int op_ = -1;
  int last_ = -1;
};

}  // namespace detail

/// Lowers a validated program into kernels and assigns steps as soon as
/// each op's arguments are ready. `default_strategy` resolves products left on auto
/// (kRounds or kComm).
inline Plan plan(const ProtocolProgram& program, ProductStrategy default_strategy = ProductStrategy::kRounds) {
  Plan p;
  p.program = program;
  p.program.validate();
  p.default_strategy = default_strategy == ProductStrategy::kAuto ? ProductStrategy::kRounds : default_strategy;
  detail::Lowering low(p);
  for (const auto& in : p.program.inputs) p.named[in.name] = low.slot(in.kind, in.name);
  p.ops.resize(p.program.nodes.size());
  for (std::size_t i = 0; i < p.program.nodes.size(); ++i) {
    const auto& n = p.program.nodes[i];
    auto& s = p.ops[i];
    s.out = n.out;
    s.op = n.op;
    s.n = n.args.size();
    s.positive = n.params.positive;
    s.order = n.params.order;
    low.lower_node(static_cast<int>(i), n, s);
  }
  std::vector<int> ready(p.slots.size(), 0);
  // An op starts once all of its arguments are ready, so its kernels span
  // exactly the op's own latency.
  std::vector<int> op_start(p.ops.size(), -1);
  for (auto& k : p.kernels) {
    int& floor = op_start[k.op];
    if (floor < 0) {
      floor = 0;
      for (const auto& a : p.program.nodes[k.op].args) floor = std::max(floor, ready[p.named.at(a)]);
    }
    int start = floor;
    for (int s : k.in) start = std::max(start, ready[s]);
    for (int a : k.after) start = std::max(start, p.kernels[a].end);
    k.start = start;
    k.end = start + kernel_rounds(k.kind);
    for (int s : k.out) ready[s] = k.end;
    p.steps = std::max(p.steps, k.end);
    auto& os = p.ops[k.op];
    if (k.kind == KernelKind::kBeaverMul) {
      ++p.standard;
      ++os.standard;
    } else if (k.kind == KernelKind::kMulRes || k.kind == KernelKind::kAddRes) {
      ++p.resharing;
      ++os.resharing;
    }
    if (kernel_rounds(k.kind) > 0) {
      os.first_step = os.first_step == 0 ? k.start + 1 : std::min(os.first_step, k.start + 1);
      os.last_step = std::max(os.last_step, k.end);
    }
  }
  if (p.steps >= 0xfff0) fail(ErrorCode::kPlanError, "program needs too many steps");
  p.digest = fnv1a(print_program(p.program) + "strategy=" + std::string(strategy_name(p.default_strategy)));
  return p;
}

/// A party's local value of a named program value.
struct LocalValue {
  ValueKind kind = ValueKind::kAdditive;
  RealElement value = 0.0;

  bool operator==(const LocalValue&) const = default;
};

using LocalValues = std::map<std::string, LocalValue>;

struct PartyContext {
  PartyId party = PartyId::kP1;
  TripleStore* triples = nullptr;
  Session* session = nullptr;
  LocalValues inputs;
  TolerancePolicy tol;
};

struct PartyResult {
  LocalValues outputs;
  SessionTranscript transcript;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Executor {
 public:
  Executor(const Plan& plan, PartyContext& ctx)
      : plan_(plan), ctx_(ctx), me_(ctx.party), env_(plan.slots.size(), 0.0),
        std_(plan.kernels.size()), res_(plan.kernels.size()), scratch_(plan.kernels.size(), 0.0),
        scratch_e_(plan.kernels.size(), 0.0) {}

  PartyResult run() {
    Session& s = *ctx_.session;
    try {
      bind_inputs();
      const std::uint64_t first_std = ctx_.triples->peek_standard_id();
      const std::uint64_t first_res = ctx_.triples->peek_resharing_id();
      bind_triples();
      const std::string hello = "start digest=" + hex64(plan_.digest) + " std=" + std::to_string(first_std) +
                                " res=" + std::to_string(first_res);
      s.send_control(0, hello);
      const std::string peer = s.recv_control(0);
      if (peer != hello) {
        fail(ErrorCode::kProtocolDesync, "session setup differs: local '" + hello + "', peer '" + peer + "'");
      }
      run_locals(0);
      for (int step = 1; step <= plan_.steps; ++step) {
        for (std::size_t k = 0; k < plan_.kernels.size(); ++k) {
          const auto& kn = plan_.kernels[k];
          if (kn.start < step && step <= kn.end) emit(k, step - kn.start, static_cast<std::uint16_t>(step));
        }
        for (std::size_t k = 0; k < plan_.kernels.size(); ++k) {
          const auto& kn = plan_.kernels[k];
          if (kn.start < step && step <= kn.end) absorb(k, step - kn.start, static_cast<std::uint16_t>(step));
        }
        run_locals(step);
      }
      const auto done_step = static_cast<std::uint16_t>(plan_.steps + 1);
      s.send_control(done_step, "done");
      s.recv_control(done_step);
    } catch (const Error& e) {
      if (!e.remote()) s.send_abort(e);
      throw;
    }
    PartyResult r;
    for (const auto& o : plan_.program.outputs) {
      const int id = plan_.named.at(o);
      r.outputs[o] = {plan_.slots[id].kind, env_[id]};
    }
    r.transcript = s.transcript();
    return r;
  }

 private:
  void bind_inputs() {
    for (const auto& in : plan_.program.inputs) {
      auto it = ctx_.inputs.find(in.name);
      if (it == ctx_.inputs.end()) fail(ErrorCode::kUsage, "missing input share for '" + in.name + "'");
      if (it->second.kind != in.kind) fail(ErrorCode::kUsage, "input '" + in.name + "' has the wrong sharing kind");
      require_finite(it->second.value, ErrorCode::kInvalidSecret, "input share '" + in.name + "'");
      if (in.kind == ValueKind::kMultiplicative && it->second.value == 0.0) {
        fail(ErrorCode::kZeroSecretUnderMss, "multiplicative input '" + in.name + "' has a zero share");
      }
      env_[plan_.named.at(in.name)] = it->second.value;
    }
  }

  void bind_triples() {
    for (std::size_t k = 0; k < plan_.kernels.size(); ++k) {
      switch (plan_.kernels[k].kind) {
        case KernelKind::kBeaverMul: std_[k] = ctx_.triples->next_standard(); break;
        case KernelKind::kMulRes:
        case KernelKind::kAddRes: res_[k] = ctx_.triples->next_resharing(); break;
        default: break;
      }
    }
  }

  bool p1() const { return me_ == PartyId::kP1; }

  protocols::ComparisonOutcome outcome(int slot) const {
    return static_cast<protocols::ComparisonOutcome>(static_cast<int>(env_[slot]));
  }

  void emit(std::size_t k, int round, std::uint16_t step) {
    const auto& kn = plan_.kernels[k];
    Session& s = *ctx_.session;
    switch (kn.kind) {
      case KernelKind::kBeaverMul: {
        const auto o = protocols::mul_open(env_[kn.in[0]], env_[kn.in[1]], std_[k]);
        s.send_scalar(step, MsgTag::kD, o.d, kn.op);
        s.send_scalar(step, MsgTag::kE, o.e, kn.op);
        scratch_[k] = o.d;
        scratch_e_[k] = o.e;
        break;
      }
      case KernelKind::kMulRes:
        s.send_scalar(step, p1() ? MsgTag::kD : MsgTag::kE, protocols::mulres_message(env_[kn.in[0]], res_[k]), kn.op);
        break;
      case KernelKind::kAddRes:
        if (round == 1 && p1()) {
          s.send_scalar(step, MsgTag::kE, protocols::addres_p1_message(env_[kn.in[0]], res_[k]), kn.op);
        } else if (round == 2 && !p1()) {
          s.send_scalar(step, MsgTag::kD, protocols::addres_p2_message(env_[kn.in[0]], env_[kn.out[0]], res_[k]),
                        kn.op);
        }
        break;
      case KernelKind::kSignReveal: {
        const int sign = protocols::share_sign(env_[kn.in[0]], ctx_.tol);
        scratch_[k] = sign;
        s.send_sign(step, sign, kn.op);
        break;
      }
      default:
        break;
    }
  }

  void absorb(std::size_t k, int round, std::uint16_t step) {
    const auto& kn = plan_.kernels[k];
    Session& s = *ctx_.session;
    switch (kn.kind) {
      case KernelKind::kBeaverMul: {
        const double pd = s.recv_scalar(step, MsgTag::kD, kn.op);
        const double pe = s.recv_scalar(step, MsgTag::kE, kn.op);
        // Sum in party order so both sides open bit-identical d and e.
        const double d = p1() ? scratch_[k] + pd : pd + scratch_[k];
        const double e = p1() ? scratch_e_[k] + pe : pe + scratch_e_[k];
        env_[kn.out[0]] = protocols::mul_close(me_, std_[k], d, e);
        break;
      }
      case KernelKind::kMulRes: {
        const double m = s.recv_scalar(step, p1() ? MsgTag::kE : MsgTag::kD, kn.op);
        env_[kn.out[0]] = protocols::mulres_close(me_, env_[kn.in[0]], res_[k], m);
        break;
      }
      case KernelKind::kAddRes:
        if (round == 1 && !p1()) {
          const double e = s.recv_scalar(step, MsgTag::kE, kn.op);
          env_[kn.out[0]] = protocols::addres_p2_share(e, res_[k], ctx_.tol);
        } else if (round == 2 && p1()) {
          const double d = s.recv_scalar(step, MsgTag::kD, kn.op);
          env_[kn.out[0]] = protocols::addres_p1_share(d, res_[k]);
        }
        break;
      case KernelKind::kSignReveal: {
        const int peer = s.recv_sign(step, kn.op);
        const int mine = static_cast<int>(scratch_[k]);
        env_[kn.out[0]] = static_cast<double>(p1() ? protocols::combine_signs(mine, peer) : protocols::combine_signs(peer, mine));
        break;
      }
      default:
        break;
    }
  }

  void run_locals(int step) {
    for (const auto& kn : plan_.kernels) {
      if (kernel_rounds(kn.kind) == 0 && kn.end == step) run_local(kn);
    }
  }

  void run_local(const Kernel& kn) {
    const auto& tol = ctx_.tol;
    auto in = [&](std::size_t i) { return env_[kn.in[i]]; };
    switch (kn.kind) {
      case KernelKind::kLinear: {
        std::vector<RealElement> xs;
        for (int s : kn.in) xs.push_back(env_[s]);
        env_[kn.out[0]] = protocols::linear_local(me_, xs, kn.coeffs, kn.bias);
        break;
      }
      case KernelKind::kExpShares: env_[kn.out[0]] = protocols::exp_local(in(0), kn.base); break;
      case KernelKind::kLogShares: env_[kn.out[0]] = protocols::log_local(me_, in(0), kn.base, kn.flag, tol); break;
      case KernelKind::kPowShares: {
        std::vector<RealElement> us;
        for (int s : kn.in) us.push_back(env_[s]);
        for (std::size_t o = 0; o < kn.out.size(); ++o) env_[kn.out[o]] = protocols::pow_local(me_, us, kn.exps[o], tol);
        break;
      }
      case KernelKind::kAbsPowShares: env_[kn.out[0]] = protocols::abs_pow_local(me_, in(0), kn.alpha, tol); break;
      case KernelKind::kTrigShares: {
        const auto t = protocols::trig_local(me_, in(0), kn.flag);
        env_[kn.out[0]] = t.m;
        env_[kn.out[1]] = t.n;
        break;
      }
      case KernelKind::kSignCorrect:
        env_[kn.out[0]] = protocols::sign_correct(in(0), outcome(kn.in[1]), kn.alpha);
        break;
      case KernelKind::kExpSelect:
        env_[kn.out[0]] = protocols::exp_select_local(me_, outcome(kn.in[2]), in(0), in(1));
        break;
      default:
        break;
    }
  }

  const Plan& plan_;
  PartyContext& ctx_;
  PartyId me_;
  std::vector<RealElement> env_;
  std::vector<StandardTripleShare> std_;
  std::vector<ResharingTripleShare> res_;
  std::vector<double> scratch_;
  std::vector<double> scratch_e_;
};

}  // namespace detail

/// Runs this party's side of a planned program over ctx.session. The peer
/// must execute the same plan. On a local error the peer is told to abort.
inline PartyResult execute(const Plan& plan, PartyContext& ctx) {
  if (ctx.session == nullptr || ctx.triples == nullptr) fail(ErrorCode::kUsage, "party context is incomplete");
  ctx.tol.validate();
  return detail::Executor(plan, ctx).run();
}

/// Opens the outputs both parties asked for. Each side sends the list it
/// consents to; only names on both lists are exchanged. Public values are
/// already known to both sides and need no exchange.
inline std::map<std::string, RealElement> reveal_outputs(Session& s, int after_step, const LocalValues& outputs,
                                                          const std::vector<std::string>& requested) {
  std::string mine;
  for (const auto& r : requested) {
    if (!outputs.count(r)) fail(ErrorCode::kUsage, "cannot reveal unknown output '" + r + "'");
    mine += (mine.empty() ? "" : ",") + r;
  }
  const auto step = static_cast<std::uint16_t>(after_step + 2);
  s.send_control(step, "reveal " + mine);
  const std::string peer_text = s.recv_control(step);
  std::vector<std::string> peer_list;
  if (peer_text.size() > 7) {
    for (auto v : split(std::string_view(peer_text).substr(7), ',')) peer_list.emplace_back(v);
  }
  // Agreed names, in P1's order so both sides exchange in the same order.
  const auto& order = s.party() == PartyId::kP1 ? requested : peer_list;
  const auto& other = s.party() == PartyId::kP1 ? peer_list : requested;
  std::map<std::string, RealElement> revealed;
  std::vector<std::string> agreed;
  for (const auto& n : order) {
    if (std::find(other.begin(), other.end(), n) != other.end()) agreed.push_back(n);
  }
  for (const auto& n : agreed) {
    if (outputs.at(n).kind != ValueKind::kPublic) s.send_scalar(step, MsgTag::kShare, outputs.at(n).value, kRevealOp);
  }
  for (const auto& n : agreed) {
    const auto& v = outputs.at(n);
    if (v.kind == ValueKind::kPublic) {
      revealed[n] = v.value;
      continue;
    }
    const double peer = s.recv_scalar(step, MsgTag::kShare, kRevealOp);
    const double a = s.party() == PartyId::kP1 ? v.value : peer;
    const double b = s.party() == PartyId::kP1 ? peer : v.value;
    revealed[n] = v.kind == ValueKind::kAdditive ? a + b : a * b;
  }
  return revealed;
}

}  // namespace asmpc
