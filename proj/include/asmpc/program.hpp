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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/sharing.hpp"

namespace asmpc {

enum class OpKind : std::uint8_t {
  kLinear, kMul, kMulRes, kAddRes, kCmp, kExp, kLog, kPow, kDiv, kProd,
  kSin, kCos, kTan, kCot, kSec, kCsc, kAsin, kAcos, kAtan, kPre, kPse,
};

inline constexpr OpKind kAllOps[] = {
    OpKind::kLinear, OpKind::kMul, OpKind::kMulRes, OpKind::kAddRes, OpKind::kCmp, OpKind::kExp,
    OpKind::kLog,    OpKind::kPow, OpKind::kDiv,    OpKind::kProd,   OpKind::kSin, OpKind::kCos,
    OpKind::kTan,    OpKind::kCot, OpKind::kSec,    OpKind::kCsc,    OpKind::kAsin, OpKind::kAcos,
    OpKind::kAtan,   OpKind::kPre, OpKind::kPse,
};

inline std::string_view op_name(OpKind op) {
  static constexpr std::string_view names[] = {
      "linear", "mul", "mulres", "addres", "cmp", "exp", "log", "pow", "div", "prod", "sin",
      "cos",    "tan", "cot",    "sec",    "csc", "asin", "acos", "atan", "pre", "pse",
  };
  return names[static_cast<int>(op)];
}

inline std::optional<OpKind> op_from_name(std::string_view name) {
  for (OpKind op : kAllOps) {
    if (op_name(op) == name) return op;
  }
  return std::nullopt;
}

/// How a product of n inputs is evaluated. kAuto defers to the engine's
/// optimization goal.
enum class ProductStrategy : std::uint8_t { kAuto, kRounds, kComm, kTree, kPower };

inline std::string_view strategy_name(ProductStrategy s) {
  switch (s) {
    case ProductStrategy::kAuto: return "auto";
    case ProductStrategy::kRounds: return "rounds";
    case ProductStrategy::kComm: return "comm";
    case ProductStrategy::kTree: return "tree";
    case ProductStrategy::kPower: return "power";
  }
  return "auto";
}

inline std::optional<ProductStrategy> strategy_from_name(std::string_view s) {
  for (auto v : {ProductStrategy::kAuto, ProductStrategy::kRounds, ProductStrategy::kComm,
                 ProductStrategy::kTree, ProductStrategy::kPower}) {
    if (strategy_name(v) == s) return v;
  }
  return std::nullopt;
}

/// ceil(log2(n)) for n >= 1.
inline int ceil_log2(std::size_t n) {
  int r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

/// True when the pairwise tree is used for an n-input product.
inline bool product_uses_tree(ProductStrategy s, std::size_t n, ProductStrategy engine_default) {
  if (s == ProductStrategy::kAuto) s = engine_default;
  switch (s) {
    case ProductStrategy::kTree: return true;
    case ProductStrategy::kPower: return false;
    case ProductStrategy::kComm: return 4 * n - 4 <= 2 * n + 2;
    default: return ceil_log2(n) < 3;
  }
}

enum class ValueKind : std::uint8_t { kAdditive, kMultiplicative, kPublic };

inline constexpr int kDefaultSeriesOrder = 15;

struct OpParams {
  std::vector<double> coeffs;
  double bias = 0.0;
  double base = std::numbers::e;
  std::vector<long> exps;
  ProductStrategy strategy = ProductStrategy::kAuto;
  int order = kDefaultSeriesOrder;
  double alpha = 1.0;
  bool positive = false;
};

struct ProgramNode {
  std::string out;
  OpKind op = OpKind::kLinear;
  std::vector<std::string> args;
  OpParams params;
};

struct ProgramInput {
  std::string name;
  ValueKind kind = ValueKind::kAdditive;
};

inline ValueKind output_kind(OpKind op) {
  if (op == OpKind::kAddRes) return ValueKind::kMultiplicative;
  if (op == OpKind::kCmp) return ValueKind::kPublic;
  return ValueKind::kAdditive;
}

inline bool valid_ref(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline bool is_integer_value(double v) { return std::isfinite(v) && std::nearbyint(v) == v; }

/// A DAG of catalog ops over named values. Both parties hold the same
/// program; only the shares differ.
class ProtocolProgram {
 public:
  std::vector<ProgramInput> inputs;
  std::vector<ProgramNode> nodes;
  std::vector<std::string> outputs;

  /// Checks refs, arity, kinds and public parameters; orders nodes so every
  /// argument is defined before use. Missing coeffs/exps default to 1.
  void validate() {
    std::map<std::string, ValueKind> kinds;
    for (const auto& in : inputs) {
      if (!valid_ref(in.name)) plan_error("bad input name '" + in.name + "'");
      if (!kinds.emplace(in.name, in.kind).second) plan_error("input '" + in.name + "' declared twice");
    }
    std::map<std::string, std::size_t> producer;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (!valid_ref(n.out)) plan_error("bad output name '" + n.out + "'");
      if (kinds.count(n.out) || !producer.emplace(n.out, i).second) {
        plan_error("'" + n.out + "' is defined more than once");
      }
    }
    // Kahn ordering; stable with respect to the written order.
    std::vector<std::vector<std::size_t>> users(nodes.size());
    std::vector<std::size_t> missing(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (const auto& a : nodes[i].args) {
        if (kinds.count(a)) continue;
        auto it = producer.find(a);
        if (it == producer.end()) plan_error("'" + nodes[i].out + "' uses undefined value '" + a + "'");
        users[it->second].push_back(i);
        ++missing[i];
      }
    }
    std::vector<ProgramNode> ordered;
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (missing[i] == 0) ready.insert(i);
    }
    while (!ready.empty()) {
      const std::size_t i = *ready.begin();
      ready.erase(ready.begin());
      ordered.push_back(nodes[i]);
      for (auto u : users[i]) {
        if (--missing[u] == 0) ready.insert(u);
      }
    }
    if (ordered.size() != nodes.size()) plan_error("program has a dependency cycle");
    nodes = std::move(ordered);
    for (auto& n : nodes) {
      check_node(n, kinds);
      kinds[n.out] = output_kind(n.op);
    }
    std::set<std::string> seen;
    for (const auto& o : outputs) {
      if (!kinds.count(o)) plan_error("output '" + o + "' is not defined");
      if (!seen.insert(o).second) plan_error("output '" + o + "' listed twice");
    }
  }

  ValueKind kind_of(const std::string& ref) const {
    for (const auto& in : inputs) {
      if (in.name == ref) return in.kind;
    }
    for (const auto& n : nodes) {
      if (n.out == ref) return output_kind(n.op);
    }
    plan_error("unknown value '" + ref + "'");
  }

 private:
  [[noreturn]] static void plan_error(const std::string& msg) { fail(ErrorCode::kPlanError, msg); }

  static void check_node(ProgramNode& n, const std::map<std::string, ValueKind>& kinds) {
    const std::string where = "'" + n.out + " = " + std::string(op_name(n.op)) + "': ";
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (n.args.size() < lo || n.args.size() > hi) plan_error(where + "wrong number of arguments");
    };
    switch (n.op) {
      case OpKind::kLinear:
        if (n.params.coeffs.empty()) n.params.coeffs.assign(n.args.size(), 1.0);
        if (n.params.coeffs.size() != n.args.size()) plan_error(where + "coeffs must match arguments");
        break;
      case OpKind::kMul:
      case OpKind::kCmp:
      case OpKind::kDiv:
      case OpKind::kPse:
        arity(2, 2);
        break;
      case OpKind::kPow:
        arity(1, SIZE_MAX);
        if (n.params.exps.empty()) n.params.exps.assign(n.args.size(), 1);
        if (n.params.exps.size() != n.args.size()) plan_error(where + "exps must match arguments");
        break;
      case OpKind::kProd:
        arity(2, SIZE_MAX);
        break;
      default:
        arity(1, 1);
    }
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      const ValueKind want = n.op == OpKind::kMulRes ? ValueKind::kMultiplicative : ValueKind::kAdditive;
      if (kinds.at(n.args[i]) != want) {
        plan_error(where + "argument '" + n.args[i] + "' must be " +
                   (want == ValueKind::kAdditive ? "additively" : "multiplicatively") + " shared");
      }
    }
    if (n.op == OpKind::kExp || n.op == OpKind::kLog) {
      if (!std::isfinite(n.params.base) || n.params.base <= 0.0 ||
          (n.op == OpKind::kLog && n.params.base == 1.0)) {
        fail(ErrorCode::kInvalidBase, where + "base must be positive" +
                                          std::string(n.op == OpKind::kLog ? " and not 1" : ""));
      }
    }
    if ((n.op == OpKind::kAsin || n.op == OpKind::kAcos || n.op == OpKind::kAtan) &&
        (n.params.order < 1 || n.params.order > 64)) {
      plan_error(where + "order must be in [1, 64]");
    }
    if (n.op == OpKind::kPre && !std::isfinite(n.params.alpha)) plan_error(where + "alpha must be finite");
    if (n.op == OpKind::kLinear) {
      for (double c : n.params.coeffs) {
        if (!std::isfinite(c)) plan_error(where + "coefficients must be finite");
      }
      if (!std::isfinite(n.params.bias)) plan_error(where + "bias must be finite");
    }
  }
};

namespace detail {

inline std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  const auto last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return s + "]";
}

}  // namespace detail

/// Parses the line-oriented program text:
///   input x y        additive inputs (optional; inferred when absent)
///   input_mss u      multiplicative inputs
///   f = op(args..., key=value, key=[v, ...])
///   output f         revealed/printed values (default: every node)
inline ProtocolProgram parse_program(std::string_view text) {
  ProtocolProgram prog;
  bool declared = false;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto bad = [&](const std::string& why) {
      fail(ErrorCode::kProgramSyntax, "line " + std::to_string(lineno) + ": " + why);
    };
    const auto words = detail::split_words(line);
    if (words[0] == "input" || words[0] == "input_mss" || words[0] == "output") {
      if (words.size() < 2) bad("expected at least one name");
      for (std::size_t i = 1; i < words.size(); ++i) {
        const std::string name(words[i]);
        if (!valid_ref(name)) bad("bad name '" + name + "'");
        if (words[0] == "output") {
          prog.outputs.push_back(name);
        } else {
          declared = true;
          prog.inputs.push_back(
              {name, words[0] == "input" ? ValueKind::kAdditive : ValueKind::kMultiplicative});
        }
      }
      continue;
    }
    const auto eq = line.find('=');
    const auto open = line.find('(');
    if (eq == std::string_view::npos || open == std::string_view::npos || open < eq || line.back() != ')') {
      bad("expected 'out = op(args...)'");
    }
    ProgramNode node;
    node.out = std::string(trim(line.substr(0, eq)));
    if (!valid_ref(node.out)) bad("bad output name '" + node.out + "'");
    const std::string name(trim(line.substr(eq + 1, open - eq - 1)));
    auto op = op_from_name(name);
    if (!op) bad("unknown op '" + name + "'");
    node.op = *op;
    const auto inner = line.substr(open + 1, line.size() - open - 2);
    for (auto arg : detail::split_top_level(inner)) {
      if (arg.empty()) bad("empty argument");
      const auto keq = arg.find('=');
      if (keq == std::string_view::npos) {
        if (!valid_ref(arg)) bad("bad argument '" + std::string(arg) + "'");
        node.args.emplace_back(arg);
        continue;
      }
      const std::string key(trim(arg.substr(0, keq)));
      const auto val = trim(arg.substr(keq + 1));
      auto number = [&](std::string_view v) {
        double d = 0.0;
        if (v == "e") return std::numbers::e;
        if (v == "pi") return std::numbers::pi;
        if (!parse_real(v, d)) bad("bad number '" + std::string(v) + "' for " + key);
        return d;
      };
      auto list = [&]() {
        if (val.size() < 2 || val.front() != '[' || val.back() != ']') bad(key + " must be a [list]");
        std::vector<double> out;
        for (auto item : detail::split_top_level(val.substr(1, val.size() - 2))) out.push_back(number(item));
        return out;
      };
      if (key == "coeffs") {
        node.params.coeffs = list();
      } else if (key == "bias") {
        node.params.bias = number(val);
      } else if (key == "base") {
        node.params.base = number(val);
      } else if (key == "exps") {
        for (double d : list()) {
          if (!is_integer_value(d) || std::fabs(d) > 1e6) bad("exps must be integers");
          node.params.exps.push_back(static_cast<long>(d));
        }
      } else if (key == "strategy") {
        auto s = strategy_from_name(val);
        if (!s) bad("strategy must be auto, rounds, comm, tree or power");
        node.params.strategy = *s;
      } else if (key == "order") {
        const double d = number(val);
        if (!is_integer_value(d)) bad("order must be an integer");
        node.params.order = static_cast<int>(d);
      } else if (key == "alpha") {
        node.params.alpha = number(val);
      } else if (key == "positive") {
        if (val != "true" && val != "false") bad("positive must be true or false");
        node.params.positive = val == "true";
      } else {
        bad("unknown parameter '" + key + "'");
      }
    }
    prog.nodes.push_back(std::move(node));
  }
  if (!declared) {
    // Undeclared inputs: anything used but never defined. mulres arguments
    // are multiplicative, everything else additive.
    std::set<std::string> defined;
    for (const auto& n : prog.nodes) defined.insert(n.out);
    std::set<std::string> seen;
    for (const auto& n : prog.nodes) {
      for (const auto& a : n.args) {
        if (defined.count(a) || !seen.insert(a).second) continue;
        prog.inputs.push_back(
            {a, n.op == OpKind::kMulRes ? ValueKind::kMultiplicative : ValueKind::kAdditive});
      }
    }
  }
  if (prog.outputs.empty()) {
    for (const auto& n : prog.nodes) prog.outputs.push_back(n.out);
  }
  prog.validate();
  return prog;
}

/// Canonical text; parse_program(print_program(p)) reproduces p.
inline std::string print_program(const ProtocolProgram& prog) {
  std::ostringstream os;
  std::string add, mss;
  for (const auto& in : prog.inputs) (in.kind == ValueKind::kMultiplicative ? mss : add) += " " + in.name;
  if (!add.empty()) os << "input" << add << '\n';
  if (!mss.empty()) os << "input_mss" << mss << '\n';
  for (const auto& n : prog.nodes) {
    os << n.out << " = " << op_name(n.op) << '(';
    std::vector<std::string> parts(n.args.begin(), n.args.end());
    const auto& p = n.params;
    switch (n.op) {
      case OpKind::kLinear:
        parts.push_back("coeffs=" + detail::format_list(p.coeffs));
        parts.push_back("bias=" + format_real(p.bias));
        break;
      case OpKind::kExp:
      case OpKind::kLog:
        parts.push_back("base=" + format_real(p.base));
        break;
      case OpKind::kPow: {
        std::string s = "exps=[";
        for (std::size_t i = 0; i < p.exps.size(); ++i) s += (i ? "," : "") + std::to_string(p.exps[i]);
        parts.push_back(s + "]");
        break;
      }
      case OpKind::kProd:
        parts.push_back("strategy=" + std::string(strategy_name(p.strategy)));
        break;
      case OpKind::kAsin:
      case OpKind::kAcos:
      case OpKind::kAtan:
        parts.push_back("order=" + std::to_string(p.order));
        break;
      case OpKind::kPre:
        parts.push_back("alpha=" + format_real(p.alpha));
        parts.push_back(std::string("positive=") + (p.positive ? "true" : "false"));
        break;
      default:
        break;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : "") << parts[i];
    os << ")\n";
  }
  if (!prog.outputs.empty()) {
    os << "output";
    for (const auto& o : prog.outputs) os << ' ' << o;
    os << '\n';
  }
  return os.str();
}

inline ProtocolProgram read_program_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kUsage, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_program(ss.str());
}

/// FNV-1a over the canonical program text.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace asmpc
