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

// Acceptance checks 1-8. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Every tolerance and trial count is pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asmpc/asmpc.hpp"
#include "test_util.hpp"

namespace asmpc {
namespace {

using Clock = std::chrono::steady_clock;
using testing::close_enough;

constexpr std::uint64_t l = kScalarBits;
constexpr double kRelTol = 1e-9;
constexpr double kSeriesRelTol = 1e-4;
constexpr int kEquivalenceRuns = 1000;
constexpr int kZeroLeakRuns = 1000;
constexpr int kComparePairs = 10000;
constexpr int kEqualPairs = 1000;
constexpr int kMaskingRuns = 10000;
constexpr double kMaskingAlpha = 0.01;
constexpr double kConformanceBudgetSeconds = 10.0;
constexpr double kEquivalenceBudgetSeconds = 60.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

void print(int n, const char* title, const Verdict& v) {
  std::printf("criterion %d: %s - %s%s%s\n", n, v.pass ? "PASS" : "FAIL", title, v.detail.empty() ? "" : ": ",
              v.detail.c_str());
  std::fflush(stdout);
}

LocalRun run(const std::string& text, const PlainEnvironment& in, std::uint64_t seed,
             ProductStrategy goal = ProductStrategy::kRounds, TransportMode mode = TransportMode::kInProc,
             RandomnessPolicy masks = {}) {
  LocalRunOptions opt;
  opt.masks = masks;
  opt.masks.seed = seed;
  opt.strategy = goal;
  opt.transport = mode;
  return run_local(parse_program(text), in, opt);
}

std::string list(const std::string& prefix, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? ", " : "") + prefix + std::to_string(i);
  return s;
}

PlainEnvironment bind(const std::string& prefix, std::size_t n, double v) {
  PlainEnvironment env;
  for (std::size_t i = 0; i < n; ++i) env[prefix + std::to_string(i)] = v;
  return env;
}

struct CostCase {
  std::string label;
  std::string text;
  PlainEnvironment in;
  std::uint64_t rounds;
  std::uint64_t bits;
  bool at_most = false;
  ProductStrategy goal = ProductStrategy::kRounds;
};

/// Measures one program and checks (rounds, bits) against the table value.
bool check_cost(const CostCase& c, Verdict& v, std::ostringstream& log) {
  const auto r = run(c.text, c.in, 42, c.goal);
  const auto got = account(r.p1.transcript);
  const bool bits_ok = c.at_most ? got.bits_total <= c.bits : got.bits_total == c.bits;
  const bool ok = bits_ok && got.rounds == c.rounds && account(r.p2.transcript) == got;
  if (!ok) {
    v.fail(c.label + " measured (" + std::to_string(got.rounds) + ", " + std::to_string(got.bits_total) +
           ") expected (" + std::to_string(c.rounds) + ", " + (c.at_most ? "<=" : "") + std::to_string(c.bits) + ")");
  }
  if (c.at_most) log << c.label << " measured " << got.bits_total / l << "l ";
  return ok;
}

Verdict criterion1() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<CostCase> cases = {
      {"mul", "f = mul(x, y)", {{"x", 2}, {"y", 3}}, 1, 4 * l},
      {"mulres", "f = mulres(u)", {{"u", 2}}, 1, 2 * l},
      {"addres", "f = addres(x)", {{"x", 2}}, 2, 2 * l},
      {"cmp", "f = cmp(x, y)", {{"x", 2}, {"y", 3}}, 3, 2 * l + 2},
      {"exp", "f = exp(x)", {{"x", 0.5}}, 1, 2 * l},
      {"log", "f = log(x)", {{"x", 3}}, 2, 2 * l},
      {"sin", "f = sin(x)", {{"x", 0.5}}, 1, 4 * l},
      {"cos", "f = cos(x)", {{"x", 0.5}}, 1, 4 * l},
      {"div", "f = div(x, y)", {{"x", 6}, {"y", 3}}, 3, 6 * l},
      {"tan", "f = tan(x)", {{"x", 0.5}}, 4, 14 * l},
      {"cot", "f = cot(x)", {{"x", 0.5}}, 4, 14 * l},
      {"sec", "f = sec(x)", {{"x", 0.5}}, 4, 12 * l, true},
      {"csc", "f = csc(x)", {{"x", 0.5}}, 4, 12 * l, true},
  };
  for (std::uint64_t n : {1, 2, 3, 8}) {
    cases.push_back({"pow n=" + std::to_string(n), "f = pow(" + list("x", n) + ")", bind("x", n, 1.5), 3,
                     (2 * n + 2) * l});
  }
  for (std::uint64_t n : {2, 3, 4, 8}) {
    const auto text = "f = prod(" + list("x", n) + ")";
    const std::uint64_t log2n = static_cast<std::uint64_t>(ceil_log2(n));
    // The rounds goal takes the tree whenever it is shallower than 3.
    const bool tree_by_rounds = log2n < 3;
    cases.push_back({"prod n=" + std::to_string(n) + " rounds", text, bind("x", n, 1.1),
                     std::min<std::uint64_t>(3, log2n), (tree_by_rounds ? 4 * n - 4 : 2 * n + 2) * l, false,
                     ProductStrategy::kRounds});
    const bool tree_by_comm = 4 * n - 4 <= 2 * n + 2;
    cases.push_back({"prod n=" + std::to_string(n) + " comm", text, bind("x", n, 1.1), tree_by_comm ? log2n : 3,
                     (tree_by_comm ? 4 * n - 4 : 2 * n + 2) * l, false, ProductStrategy::kComm});
    cases.push_back({"prod n=" + std::to_string(n) + " tree", "f = prod(" + list("x", n) + ", strategy=tree)",
                     bind("x", n, 1.1), log2n, (4 * n - 4) * l});
    cases.push_back({"prod n=" + std::to_string(n) + " power", "f = prod(" + list("x", n) + ", strategy=power)",
                     bind("x", n, 1.1), 3, (2 * n + 2) * l});
  }
  std::ostringstream log;
  int ok = 0;
  for (const auto& c : cases) ok += check_cost(c, v, log);
  const double secs = seconds_since(t0);
  if (secs >= kConformanceBudgetSeconds) v.fail("took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << ok << "/" << cases.size() << " table entries exact; " << log.str() << "(bound 12l); " << secs << " s";
  if (v.pass) v.detail = d.str();
  return v;
}

/// Runs `runs` draws of one case through both parties and the oracle.
/// Returns the worst relative error seen.
double equivalence(const testing::OpCase& oc, int runs, std::uint64_t seed, Verdict& v) {
  std::mt19937_64 g(seed);
  double worst = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto s = oc.draw(g);
    const auto want = eval_plain(parse_program(s.text), s.inputs).at("f");
    double got = 0.0;
    try {
      got = run(s.text, s.inputs, seed * 100000 + i).revealed.at("f");
    } catch (const Error& e) {
      v.fail(oc.name + " raised " + e.what());
      return worst;
    }
    worst = std::max(worst, std::fabs(got - want) / std::max(1.0, std::fabs(want)));
    if (!close_enough(got, want, oc.rel_tol)) {
      std::ostringstream d;
      d.precision(17);
      d << oc.name << ": " << s.text << " got " << got << " want " << want;
      v.fail(d.str());
    }
  }
  return worst;
}

Verdict criterion2() {
  Verdict v;
  std::ostringstream log;
  check_cost({"pre", "f = pre(x, alpha=3)", {{"x", -2}}, 4, 4 * l + 2}, v, log);
  check_cost({"pse", "f = pse(x, y)", {{"x", 2}, {"y", 3}}, 5, 8 * l + 2}, v, log);
  double worst = 0.0;
  for (const auto& oc : testing::op_cases()) {
    if (oc.name == "pre" || oc.name == "pse") worst = std::max(worst, equivalence(oc, kEquivalenceRuns, 7, v));
  }
  if (v.pass) {
    std::ostringstream d;
    d << "pre (4, 4l+2) and pse (5, 8l+2) exact; " << 2 * kEquivalenceRuns << " runs, max rel err " << worst
      << " <= " << kRelTol;
    v.detail = d.str();
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto t0 = Clock::now();
  double worst = 0.0, worst_series = 0.0;
  std::size_t ops = 0;
  std::uint64_t seed = 100;
  for (const auto& oc : testing::op_cases()) {
    const double w = equivalence(oc, kEquivalenceRuns, ++seed, v);
    double& slot = oc.rel_tol == kSeriesRelTol ? worst_series : worst;
    slot = std::max(slot, w);
    ++ops;
  }
  const double secs = seconds_since(t0);
  if (secs >= kEquivalenceBudgetSeconds) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) {
    std::ostringstream d;
    d << ops << " cases x " << kEquivalenceRuns << " runs; max rel err " << worst << " (tol " << kRelTol
      << "), series " << worst_series << " (tol " << kSeriesRelTol << "); " << secs << " s";
    v.detail = d.str();
  }
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto p = plan(parse_program("f = addres(x)"));
  double worst = 0.0;
  for (int i = 0; i < kZeroLeakRuns; ++i) {
    RandomnessPolicy masks;
    masks.seed = 5000 + i;
    MaskSampler rng(masks, 2);
    auto [in1, in2] = share_inputs(p.program, {{"x", 0.0}}, rng);
    auto dealt = generate_triples(p.standard, p.resharing, masks);
    const auto r = testing::run_pair(p, p, dealt.p1, dealt.p2, in1, in2);
    if (r.e1 || r.e2) {
      v.fail("run " + std::to_string(i) + " raised");
      continue;
    }
    const double x1 = in1.at("x").value;
    const double u1 = r.r1.outputs.at("f").value;
    const double bound = 1e-9 * std::fabs(x1) + 1e-30;
    worst = std::max(worst, std::fabs(u1));
    if (std::fabs(u1) > bound) v.fail("run " + std::to_string(i) + ": |u1| = " + std::to_string(std::fabs(u1)));
  }
  if (v.pass) {
    std::ostringstream d;
    d << kZeroLeakRuns << " runs, max |u1| = " << worst;
    v.detail = d.str();
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  constexpr std::size_t kBatch = 100;
  constexpr double kScale = 100.0;
  const TolerancePolicy tol;
  std::mt19937_64 g(55);
  std::string text;
  for (std::size_t i = 0; i < kBatch; ++i) text += "c" + std::to_string(i) + " = cmp(x" + std::to_string(i) + ", y" + std::to_string(i) + ")\n";
  int correct = 0, tried = 0;
  std::uint64_t seed = 9000;
  while (tried < kComparePairs) {
    PlainEnvironment in;
    std::vector<double> want(kBatch);
    for (std::size_t i = 0; i < kBatch; ++i) {
      double x, y;
      do {
        x = testing::uniform(g, -kScale, kScale);
        y = (g() % 4 == 0) ? x + testing::signed_magnitude(g, 1e-6, 1e-2) : testing::uniform(g, -kScale, kScale);
      } while (!(std::fabs(x - y) > 10 * tol.delta * std::max({1.0, std::fabs(x), std::fabs(y)})));
      in["x" + std::to_string(i)] = x;
      in["y" + std::to_string(i)] = y;
      want[i] = x > y ? 1.0 : -1.0;
    }
    const auto r = run(text, in, ++seed);
    for (std::size_t i = 0; i < kBatch; ++i) {
      ++tried;
      if (r.revealed.at("c" + std::to_string(i)) == want[i]) {
        ++correct;
      } else {
        v.fail("x=" + std::to_string(in["x" + std::to_string(i)]) + " y=" + std::to_string(in["y" + std::to_string(i)]));
      }
    }
  }
  int equal = 0;
  for (int done = 0; done < kEqualPairs; done += static_cast<int>(kBatch)) {
    PlainEnvironment in;
    for (std::size_t i = 0; i < kBatch; ++i) {
      const double x = testing::uniform(g, -kScale, kScale);
      in["x" + std::to_string(i)] = in["y" + std::to_string(i)] = x;
    }
    const auto r = run(text, in, ++seed);
    for (std::size_t i = 0; i < kBatch; ++i) equal += r.revealed.at("c" + std::to_string(i)) == 0.0;
  }
  if (equal != kEqualPairs) v.fail(std::to_string(kEqualPairs - equal) + " equal pairs not reported Equal");
  if (v.pass) {
    v.detail = std::to_string(correct) + "/" + std::to_string(kComparePairs) + " separated pairs correct, " +
               std::to_string(equal) + "/" + std::to_string(kEqualPairs) + " equal pairs Equal";
  }
  return v;
}

/// The opened d = x - a of each mul (sum of both parties' D messages),
/// across runs with a fixed x.
std::vector<double> opened_d(double x, std::uint64_t seed0, const RandomnessPolicy& masks) {
  constexpr std::size_t kBatch = 100;
  std::string text;
  PlainEnvironment in;
  for (std::size_t i = 0; i < kBatch; ++i) {
    const auto k = std::to_string(i);
    text += "f" + k + " = mul(x" + k + ", y" + k + ")\n";
    in["x" + k] = x;
    in["y" + k] = 3.0;
  }
  std::vector<double> out;
  for (std::uint64_t s = seed0; out.size() < static_cast<std::size_t>(kMaskingRuns); ++s) {
    const auto r = run(text, in, s, ProductStrategy::kRounds, TransportMode::kInProc, masks);
    std::vector<double> d(kBatch, 0.0);
    for (const auto& f : r.p1.transcript.frames) {
      if (f.tag == MsgTag::kD && f.op >= 0) d[static_cast<std::size_t>(f.op)] += Frame{0, f.step, f.tag, f.payload}.scalar_value();
    }
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(kMaskingRuns);
  return out;
}

Verdict criterion6() {
  Verdict v;
  const auto wide = RandomnessPolicy::wide();
  const auto a = opened_d(1.0, 1, wide);
  const auto b = opened_d(-250.0, 1000001, wide);
  const double d = testing::ks_statistic(a, b);
  const double pv = testing::ks_pvalue(d, a.size(), b.size());
  // Reported, not gated: the default precision profile trades hiding for
  // accuracy, and at this input scale the shift is plainly visible.
  const auto pa = opened_d(1.0, 1, {});
  const auto pb = opened_d(-250.0, 1000001, {});
  const double pp = testing::ks_pvalue(testing::ks_statistic(pa, pb), pa.size(), pb.size());
  std::ostringstream s;
  s << "wide masks, x=1 vs x=-250, " << kMaskingRuns << " runs each: D=" << d << " p=" << pv
    << " (precision profile, informational: p=" << pp << ")";
  if (!(pv > kMaskingAlpha)) v.fail(s.str() + " <= " + std::to_string(kMaskingAlpha));
  if (v.pass) v.detail = s.str();
  return v;
}

const char* kCorpus =
    "a = mul(x, y)\nb = div(a, y)\nc = cmp(b, x)\nd = exp(x)\ne = log(y)\ng = pow(x, y, exps=[2, -1])\n"
    "h = prod(x, y, a, b, strategy=power)\ni = tan(x)\nj = sec(x)\nk = asin(z)\nm = atan(z)\n"
    "n = pre(y, alpha=1.5)\no = pse(y, x)\n";
const PlainEnvironment kCorpusInputs = {{"x", 0.7}, {"y", 1.9}, {"z", 0.3}};

Verdict criterion7() {
  Verdict v;
  const auto a = run(kCorpus, kCorpusInputs, 77, ProductStrategy::kRounds, TransportMode::kInProc);
  const auto b = run(kCorpus, kCorpusInputs, 77, ProductStrategy::kRounds, TransportMode::kTcp);
  if (account(a.p1.transcript) != account(b.p1.transcript)) v.fail("accounting differs");
  if (a.p1.transcript.serialize() != b.p1.transcript.serialize() ||
      a.p2.transcript.serialize() != b.p2.transcript.serialize()) {
    v.fail("transcripts differ");
  }
  if (v.pass) {
    const auto c = account(a.p1.transcript);
    v.detail = std::to_string(a.plan.ops.size()) + " ops, " + std::to_string(c.rounds) + " rounds, " +
               std::to_string(c.bits_total) + " bits, " + std::to_string(a.p1.transcript.frames.size()) +
               " frames identical over inproc and tcp";
  }
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto a = run(kCorpus, kCorpusInputs, 2026);
  const auto b = run(kCorpus, kCorpusInputs, 2026);
  if (a.p1.transcript.serialize() != b.p1.transcript.serialize() ||
      a.p2.transcript.serialize() != b.p2.transcript.serialize()) {
    v.fail("transcripts differ");
  }
  // Bitwise comparison of outputs, shares included.
  auto same = [](const LocalValues& x, const LocalValues& y) {
    if (x.size() != y.size()) return false;
    for (const auto& [k, val] : x) {
      auto it = y.find(k);
      if (it == y.end() || std::memcmp(&val.value, &it->second.value, sizeof(double)) != 0) return false;
    }
    return true;
  };
  if (!same(a.p1.outputs, b.p1.outputs) || !same(a.p2.outputs, b.p2.outputs)) v.fail("output shares differ");
  if (a.revealed != b.revealed) v.fail("revealed values differ");
  if (v.pass) v.detail = "two seeded runs bit-identical (" + std::to_string(a.revealed.size()) + " outputs)";
  return v;
}

}  // namespace
}  // namespace asmpc

int main() {
  using namespace asmpc;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"cost table conformance", criterion1},
      {"real power protocols", criterion2},
      {"oracle equivalence", criterion3},
      {"zero-leak resharing", criterion4},
      {"comparison soundness", criterion5},
      {"masking invariance", criterion6},
      {"transport parity", criterion7},
      {"determinism", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    print(static_cast<int>(i + 1), criteria[i].first, v);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
