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
#include <numbers>
#include <string>
#include <vector>

#include "asmpc/dealer.hpp"
#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/sharing.hpp"

/// Per-party arithmetic of the protocol catalog. Every function here sees
/// only the calling party's shares, its triple share and what the peer sent;
/// the engine moves the messages.
namespace asmpc::protocols {

enum class ComparisonOutcome : int { kLess = -1, kEqual = 0, kGreater = 1 };

inline const char* outcome_name(ComparisonOutcome c) {
  switch (c) {
    case ComparisonOutcome::kLess: return "Less";
    case ComparisonOutcome::kEqual: return "Equal";
    case ComparisonOutcome::kGreater: return "Greater";
  }
  return "?";
}

inline bool is_p1(PartyId p) { return p == PartyId::kP1; }

inline void check_result(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::kNumericOverflow, std::string(what) + " overflowed");
}

// Linear combination: P2 alone adds the bias.
inline RealElement linear_local(PartyId p, const std::vector<RealElement>& xs,
                                const std::vector<double>& coeffs, double bias) {
  RealElement acc = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) acc += coeffs[j] * xs[j];
  return is_p1(p) ? acc : acc + bias;
}

// Beaver multiplication. Each party opens d_i = x_i - a_i and e_i = y_i - b_i.
struct MulOpening {
  RealElement d;
  RealElement e;
};

inline MulOpening mul_open(RealElement x, RealElement y, const StandardTripleShare& t) {
  return {x - t.a, y - t.b};
}

/// d and e are the opened sums d_1 + d_2 and e_1 + e_2. P2 adds e*d.
inline RealElement mul_close(PartyId p, const StandardTripleShare& t, RealElement d, RealElement e) {
  const RealElement f = t.c + d * t.b + e * t.a;
  return is_p1(p) ? f : f + e * d;
}

// Multiplicative to additive resharing. P1 sends u_1 - a, P2 sends u_2 - b,
// in the same round.
inline RealElement mulres_message(RealElement u, const ResharingTripleShare& t) { return u - t.mask; }

inline RealElement mulres_close(PartyId p, RealElement u, const ResharingTripleShare& t,
                                RealElement peer_message) {
  if (is_p1(p)) return t.c + peer_message * t.mask;  // c_1 + e*a
  const RealElement e = u - t.mask;
  return t.c + peer_message * t.mask + e * peer_message;  // c_2 + d*b + e*d
}

// Additive to multiplicative resharing: P1 sends e, then P2 sends d.
inline RealElement addres_p1_message(RealElement x1, const ResharingTripleShare& t) {
  return (x1 - t.c) / t.mask;
}

inline RealElement addres_p2_share(RealElement e, const ResharingTripleShare& t, const TolerancePolicy& tol) {
  const RealElement u2 = e + t.mask;
  if (!(std::fabs(u2) >= tol.zero_guard)) {
    fail(ErrorCode::kNearZeroDenominator, "additive resharing drew |u2| below the zero guard; rerun with fresh triples");
  }
  return u2;
}

inline RealElement addres_p2_message(RealElement x2, RealElement u2, const ResharingTripleShare& t) {
  return (x2 - t.c) / u2;
}

inline RealElement addres_p1_share(RealElement d, const ResharingTripleShare& t) { return d + t.mask; }

/// Sign of a multiplicative share under the zero test: -1, 0 or +1.
inline int share_sign(RealElement u, const TolerancePolicy& tol) {
  if (std::fabs(u) < tol.delta) return 0;
  return u > 0 ? 1 : -1;
}

inline ComparisonOutcome combine_signs(int s1, int s2) {
  if (s1 == 0 || s2 == 0) return ComparisonOutcome::kEqual;
  return s1 == s2 ? ComparisonOutcome::kGreater : ComparisonOutcome::kLess;
}

/// P1's multiplicative share is treated as an exact zero below delta; P2's
/// never is, since resharing keeps it above the zero guard.
inline bool zero_share(PartyId p, RealElement u, const TolerancePolicy& tol) {
  return is_p1(p) && std::fabs(u) < tol.delta;
}

inline RealElement exp_local(RealElement x, double base) {
  const RealElement u = base == std::numbers::e ? std::exp(x) : std::pow(base, x);
  check_result(u, "exponential share");
  return u;
}

/// log_base |u|. A zero share at P1 is a zero secret: error unless
/// `zero_ok`, in which case a placeholder 0 is returned.
inline RealElement log_local(PartyId p, RealElement u, double base, bool zero_ok, const TolerancePolicy& tol) {
  if (zero_share(p, u, tol)) {
    if (zero_ok) return 0.0;
    fail(ErrorCode::kLogOfZero, "logarithm of a zero secret");
  }
  const RealElement l = std::log(std::fabs(u));
  return base == std::numbers::e ? l : l / std::log(base);
}

/// u^alpha for one share, with P1's zero share raised as a literal zero.
inline RealElement power_factor(PartyId p, RealElement u, double alpha, bool absolute, const TolerancePolicy& tol) {
  if (alpha == 0.0) return 1.0;
  if (zero_share(p, u, tol)) {
    if (alpha < 0.0) fail(ErrorCode::kDivisionByZero, "negative power of a zero secret");
    return 0.0;
  }
  return std::pow(absolute ? std::fabs(u) : u, alpha);
}

/// prod_j u_j^{alpha_j} for one party.
inline RealElement pow_local(PartyId p, const std::vector<RealElement>& us, const std::vector<long>& exps,
                             const TolerancePolicy& tol) {
  RealElement v = 1.0;
  for (std::size_t j = 0; j < us.size(); ++j) v *= power_factor(p, us[j], static_cast<double>(exps[j]), false, tol);
  check_result(v, "power share");
  return v;
}

inline RealElement abs_pow_local(PartyId p, RealElement u, double alpha, const TolerancePolicy& tol) {
  const RealElement v = power_factor(p, u, alpha, true, tol);
  check_result(v, "power share");
  return v;
}

/// Multiplicative operands (m, n) for the sine and cosine protocols.
/// Sine cross-assigns at P2 so that m_1 m_2 + n_1 n_2 = sin(x_1 + x_2);
/// cosine uses n_1 n_2 - m_1 m_2 = cos(x_1 + x_2).
struct TrigOperands {
  RealElement m;
  RealElement n;
};

inline TrigOperands trig_local(PartyId p, RealElement x, bool sine) {
  if (sine && !is_p1(p)) return {std::cos(x), std::sin(x)};
  return {std::sin(x), std::cos(x)};
}

/// Sign correction after a real power of a negative secret. Integer alpha
/// flips the sign when odd; anything else has no real value.
inline RealElement sign_correct(RealElement f, ComparisonOutcome sign, double alpha) {
  if (sign != ComparisonOutcome::kLess) return f;
  if (std::nearbyint(alpha) != alpha) {
    fail(ErrorCode::kComplexResultUnsupported,
         "negative base with non-integer exponent; pass positive=true to use |x|");
  }
  return std::fmod(std::fabs(alpha), 2.0) == 1.0 ? -f : f;
}

/// Multiplicative operand for the secret-exponent power: e^{s_i}, times
/// (-1)^{round(y_i)} for a negative base, or the pair (0, 1) for a zero base.
inline RealElement exp_select_local(PartyId p, ComparisonOutcome sign, RealElement s, RealElement y) {
  if (sign == ComparisonOutcome::kEqual) return is_p1(p) ? 0.0 : 1.0;
  RealElement v = std::exp(s);
  check_result(v, "exponential share");
  if (sign == ComparisonOutcome::kLess && std::fmod(std::fabs(std::nearbyint(y)), 2.0) == 1.0) v = -v;
  return v;
}

/// Maclaurin coefficients of arcsin: c_k = (2k)! / (4^k (k!)^2 (2k+1)),
/// via c_{k+1} = c_k (2k+1)^2 / ((2k+2)(2k+3)).
inline std::vector<double> asin_coefficients(int order) {
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(order));
  double ck = 1.0;
  for (int k = 0; k < order; ++k) {
    c.push_back(ck);
    const double n = 2.0 * k + 1.0;
    ck = ck * n * n / ((n + 1.0) * (n + 2.0));
  }
  return c;
}

}  // namespace asmpc::protocols
