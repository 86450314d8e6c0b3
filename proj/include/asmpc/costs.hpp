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

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "asmpc/engine.hpp"
#include "asmpc/program.hpp"
#include "asmpc/transport.hpp"

namespace asmpc {

/// Cost formula: rounds = rounds_const (or ceil(log2 n)),
/// bits = (l_const + l_per_n*n + l_per_order*order) * l + extra_bits.
struct CostFormula {
  const char* rounds_text;
  const char* bits_text;
  int rounds_const;
  bool rounds_log2n;
  int l_const;
  int l_per_n;
  int l_per_order;
  int extra_bits;
  /// The bit count is an upper bound rather than an exact figure.
  bool upper_bound;
};

/// Published costs of the catalog. Series-based ops (asin, acos, atan) use
/// the cost of the composition as built here.
inline CostFormula cost_formula(const OpSchedule& s) {
  switch (s.op) {
    case OpKind::kLinear: return {"0", "0", 0, false, 0, 0, 0, 0, false};
    case OpKind::kMul: return {"1", "4l", 1, false, 4, 0, 0, 0, false};
    case OpKind::kMulRes: return {"1", "2l", 1, false, 2, 0, 0, 0, false};
    case OpKind::kAddRes: return {"2", "2l", 2, false, 2, 0, 0, 0, false};
    case OpKind::kCmp: return {"3", "2l+2", 3, false, 2, 0, 0, 2, false};
    case OpKind::kExp: return {"1", "2l", 1, false, 2, 0, 0, 0, false};
    case OpKind::kLog: return {"2", "2l", 2, false, 2, 0, 0, 0, false};
    case OpKind::kPow: return {"3", "(2n+2)l", 3, false, 2, 2, 0, 0, false};
    case OpKind::kDiv: return {"3", "6l", 3, false, 6, 0, 0, 0, false};
    case OpKind::kProd:
      if (s.tree) return {"ceil(log2 n)", "(4n-4)l", 0, true, -4, 4, 0, 0, false};
      return {"3", "(2n+2)l", 3, false, 2, 2, 0, 0, false};
    case OpKind::kSin:
    case OpKind::kCos: return {"1", "4l", 1, false, 4, 0, 0, 0, false};
    case OpKind::kTan:
    case OpKind::kCot: return {"4", "14l", 4, false, 14, 0, 0, 0, false};
    case OpKind::kSec:
    case OpKind::kCsc: return {"4", "<=12l", 4, false, 12, 0, 0, 0, true};
    case OpKind::kAsin:
    case OpKind::kAcos: return {"3", "(2k+2)l", 3, false, 2, 0, 2, 0, false};
    case OpKind::kAtan: return {"8", "(2k+14)l", 8, false, 14, 0, 2, 0, false};
    case OpKind::kPre:
      if (s.positive) return {"3", "4l", 3, false, 4, 0, 0, 0, false};
      return {"4", "4l+2", 4, false, 4, 0, 0, 2, false};
    case OpKind::kPse: return {"5", "8l+2", 5, false, 8, 0, 0, 2, false};
  }
  return {"?", "?", 0, false, 0, 0, 0, 0, false};
}

struct ExpectedCost {
  std::uint64_t rounds = 0;
  std::uint64_t bits = 0;
  bool upper_bound = false;
};

inline ExpectedCost expected_cost(const OpSchedule& s) {
  const auto f = cost_formula(s);
  ExpectedCost c;
  c.rounds = f.rounds_log2n ? static_cast<std::uint64_t>(ceil_log2(s.n)) : static_cast<std::uint64_t>(f.rounds_const);
  const long long ls = f.l_const + f.l_per_n * static_cast<long long>(s.n) + f.l_per_order * static_cast<long long>(s.order);
  c.bits = static_cast<std::uint64_t>(ls) * kScalarBits + static_cast<std::uint64_t>(f.extra_bits);
  c.upper_bound = f.upper_bound;
  return c;
}

struct ReportRow {
  std::string label;
  std::string op;
  std::size_t n = 0;
  ExpectedCost expected;
  CostSummary actual;
  std::string rounds_text;
  std::string bits_text;

  bool matches() const {
    const bool bits_ok = expected.upper_bound ? actual.bits_total <= expected.bits : actual.bits_total == expected.bits;
    return bits_ok && actual.rounds == expected.rounds;
  }
};

/// Expected-versus-measured costs of one run, plus outputs and timing.
struct RunReport {
  std::vector<ReportRow> rows;
  ReportRow total;
  std::map<std::string, RealElement> revealed;
  double seconds = 0.0;

  bool all_match() const {
    for (const auto& r : rows) {
      if (!r.matches()) return false;
    }
    return total.matches();
  }

  /// `op,n,rounds_expected,rounds_actual,bits_expected,bits_actual`; upper
  /// bounds are written as `<=N`.
  std::string csv() const {
    std::ostringstream os;
    os << "op,n,rounds_expected,rounds_actual,bits_expected,bits_actual\n";
    auto row = [&](const ReportRow& r) {
      os << r.op << ',' << r.n << ',' << r.expected.rounds << ',' << r.actual.rounds << ','
         << (r.expected.upper_bound ? "<=" : "") << r.expected.bits << ',' << r.actual.bits_total << '\n';
    };
    for (const auto& r : rows) row(r);
    row(total);
    return os.str();
  }

  std::string text() const {
    std::ostringstream os;
    for (const auto& r : rows) {
      os << r.label << ": " << r.op << " n=" << r.n << " rounds " << r.actual.rounds << " (expected "
         << r.rounds_text << " = " << r.expected.rounds << "), bits " << r.actual.bits_total << " (expected "
         << r.bits_text << " = " << (r.expected.upper_bound ? "<=" : "") << r.expected.bits << ") "
         << (r.matches() ? "ok" : "MISMATCH") << '\n';
    }
    os << "total: rounds " << total.actual.rounds << " (planned " << total.expected.rounds << "), bits "
       << total.actual.bits_total << " (p1 " << total.actual.bits_p1 << ", p2 " << total.actual.bits_p2 << ")\n";
    for (const auto& [k, v] : revealed) os << k << " = " << format_real(v) << '\n';
    os << "elapsed " << seconds << " s\n";
    return os.str();
  }
};

inline RunReport make_report(const Plan& plan, const SessionTranscript& t) {
  RunReport rep;
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < plan.ops.size(); ++i) {
    const auto& s = plan.ops[i];
    ReportRow r;
    r.label = s.out;
    r.op = std::string(op_name(s.op));
    r.n = s.n;
    r.expected = expected_cost(s);
    r.actual = account_op(t, static_cast<int>(i));
    const auto f = cost_formula(s);
    r.rounds_text = f.rounds_text;
    r.bits_text = f.bits_text;
    bits += r.expected.bits;
    rep.total.expected.upper_bound = rep.total.expected.upper_bound || r.expected.upper_bound;
    rep.rows.push_back(r);
  }
  rep.total.label = "total";
  rep.total.op = "total";
  rep.total.n = plan.ops.size();
  rep.total.expected.rounds = static_cast<std::uint64_t>(plan.steps);
  rep.total.expected.bits = bits;
  rep.total.actual = account(t);
  return rep;
}

}  // namespace asmpc
