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

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/program.hpp"
#include "asmpc/protocols.hpp"

namespace asmpc {

/// Plaintext bindings for every program value.
using PlainEnvironment = std::map<std::string, RealElement>;

namespace detail {

inline double series_asin(double x, int order) {
  const auto c = protocols::asin_coefficients(order);
  double acc = 0.0;
  double p = x;
  const double x2 = x * x;
  for (double ck : c) {
    acc += ck * p;
    p *= x2;
  }
  return acc;
}

/// x^alpha with the protocol's conventions for zero and negative bases.
inline double real_power(double x, double alpha, bool positive, const std::string& where) {
  if (x == 0.0) {
    if (alpha < 0.0) fail(ErrorCode::kOracleDomainError, where + "negative power of zero");
    return alpha == 0.0 ? 1.0 : 0.0;
  }
  if (x > 0.0 || positive) return std::pow(std::fabs(x), alpha);
  if (!is_integer_value(alpha)) fail(ErrorCode::kOracleDomainError, where + "negative base with non-integer exponent");
  return std::pow(x, alpha);
}

}  // namespace detail

/// Evaluates a program directly on secrets. Semantics follow the protocols:
/// log is log_base|x|, arcsin is the truncated series of the same order,
/// cmp is sign(x - y) with |x - y| < delta counted as equal.
inline PlainEnvironment eval_plain(ProtocolProgram program, PlainEnvironment env,
                                   const TolerancePolicy& tol = {}) {
  program.validate();
  for (const auto& in : program.inputs) {
    auto it = env.find(in.name);
    if (it == env.end()) fail(ErrorCode::kUsage, "input '" + in.name + "' is not bound");
    if (in.kind == ValueKind::kMultiplicative && it->second == 0.0) {
      fail(ErrorCode::kZeroSecretUnderMss, "multiplicative input '" + in.name + "' is zero");
    }
  }
  for (const auto& n : program.nodes) {
    const std::string where = "node '" + n.out + "': ";
    auto domain = [&](const std::string& why) { fail(ErrorCode::kOracleDomainError, where + why); };
    std::vector<double> a;
    for (const auto& r : n.args) a.push_back(env.at(r));
    const auto& p = n.params;
    double v = 0.0;
    switch (n.op) {
      case OpKind::kLinear:
        v = p.bias;
        for (std::size_t j = 0; j < a.size(); ++j) v += p.coeffs[j] * a[j];
        break;
      case OpKind::kMul: v = a[0] * a[1]; break;
      case OpKind::kMulRes:
      case OpKind::kAddRes: v = a[0]; break;
      case OpKind::kCmp: {
        const double d = a[0] - a[1];
        v = std::fabs(d) < tol.delta ? 0.0 : (d > 0 ? 1.0 : -1.0);
        break;
      }
      case OpKind::kExp: v = std::pow(p.base, a[0]); break;
      case OpKind::kLog:
        if (a[0] == 0.0) domain("logarithm of zero");
        v = std::log(std::fabs(a[0])) / std::log(p.base);
        break;
      case OpKind::kPow:
        v = 1.0;
        for (std::size_t j = 0; j < a.size(); ++j) v *= detail::real_power(a[j], static_cast<double>(p.exps[j]), false, where);
        break;
      case OpKind::kDiv:
        if (a[1] == 0.0) domain("division by zero");
        v = a[0] / a[1];
        break;
      case OpKind::kProd:
        v = 1.0;
        for (double x : a) v *= x;
        break;
      case OpKind::kSin: v = std::sin(a[0]); break;
      case OpKind::kCos: v = std::cos(a[0]); break;
      case OpKind::kTan:
        if (std::cos(a[0]) == 0.0) domain("tangent pole");
        v = std::sin(a[0]) / std::cos(a[0]);
        break;
      case OpKind::kCot:
        if (std::sin(a[0]) == 0.0) domain("cotangent pole");
        v = std::cos(a[0]) / std::sin(a[0]);
        break;
      case OpKind::kSec:
        if (std::cos(a[0]) == 0.0) domain("secant pole");
        v = 1.0 / std::cos(a[0]);
        break;
      case OpKind::kCsc:
        if (std::sin(a[0]) == 0.0) domain("cosecant pole");
        v = 1.0 / std::sin(a[0]);
        break;
      case OpKind::kAsin: v = detail::series_asin(a[0], p.order); break;
      case OpKind::kAcos: v = std::numbers::pi / 2 - detail::series_asin(a[0], p.order); break;
      case OpKind::kAtan: v = detail::series_asin(a[0] / std::sqrt(1.0 + a[0] * a[0]), p.order); break;
      case OpKind::kPre: v = detail::real_power(a[0], p.alpha, p.positive, where); break;
      case OpKind::kPse:
        if (a[0] == 0.0) {
          v = 0.0;
        } else if (a[0] > 0.0) {
          v = std::exp(a[1] * std::log(a[0]));
        } else {
          if (!is_integer_value(a[1])) domain("negative base with non-integer secret exponent");
          v = std::pow(a[0], a[1]);
        }
        break;
    }
    if (!std::isfinite(v)) domain("result is not finite");
    env[n.out] = v;
  }
  return env;
}

}  // namespace asmpc
