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
#include <optional>
#include <random>
#include <string>

#include "asmpc/error.hpp"

namespace asmpc {

/// Scalar of the real field. Shares, masks and wire payloads all use it.
using RealElement = double;

/// Logical bit width of one scalar on the wire (l in the cost formulas).
inline constexpr std::uint64_t kScalarBits = 64;

/// Bounds of the mask distributions. Additive masks are uniform on
/// [-additive_bound, additive_bound]; multiplicative masks are uniform on
/// [-mult_bound, -mult_floor] u [mult_floor, mult_bound].
struct RandomnessPolicy {
  double additive_bound = 0.25;
  double mult_bound = 2.0;
  double mult_floor = 1.0;
  std::optional<std::uint64_t> seed;

  /// Narrow masks that keep every catalog op within 1e-9 of the oracle.
  static RandomnessPolicy precision() { return {}; }

  /// Wide masks with strong statistical hiding. Nonlinear ops lose precision
  /// under this profile; see README.
  static RandomnessPolicy wide() {
    RandomnessPolicy p;
    p.additive_bound = std::ldexp(1.0, 20);
    p.mult_bound = std::ldexp(1.0, 10);
    p.mult_floor = std::ldexp(1.0, -10);
    return p;
  }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(additive_bound)) {
      fail(ErrorCode::kConfig, "mask.additive_bound must be positive and finite");
    }
    if (!positive(mult_bound) || !positive(mult_floor)) {
      fail(ErrorCode::kConfig, "mask.mult_bound and mask.mult_floor must be positive and finite");
    }
    if (!(mult_floor < mult_bound)) {
      fail(ErrorCode::kConfig, "mask.mult_floor must be below mask.mult_bound");
    }
  }
};

struct TolerancePolicy {
  /// Zero test applied to multiplicative shares (comparison, log, powers).
  double delta = 1e-9;
  double oracle_rel_tol = 1e-9;
  /// Smallest admissible divisor in additive resharing.
  double zero_guard = 1e-30;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(delta) || !positive(oracle_rel_tol) || !positive(zero_guard)) {
      fail(ErrorCode::kConfig, "tolerances must be positive and finite");
    }
    if (!(zero_guard < delta)) {
      fail(ErrorCode::kConfig, "tol.zero_guard must be below tol.delta");
    }
  }
};

inline void require_finite(RealElement v, ErrorCode code, const std::string& what) {
  if (!std::isfinite(v)) fail(code, what + " is not finite");
}

/// |got - want| / max(1, |want|).
inline double relative_error(double got, double want) {
  return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent seed for a named stream under a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (stream * 0xd1b54a32d192ed03ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Mask generator owned by one party or the dealer. The integer-to-real
/// conversion is done by hand so seeded streams match across standard
/// libraries.
class MaskSampler {
 public:
  explicit MaskSampler(const RandomnessPolicy& policy, std::uint64_t stream = 0)
      : policy_(policy) {
    policy_.validate();
    std::uint64_t base = policy.seed ? *policy.seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
    engine_.seed(derive_seed(base, stream));
  }

  const RandomnessPolicy& policy() const { return policy_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  RealElement draw_additive_mask() {
    return policy_.additive_bound * (2.0 * uniform01() - 1.0);
  }

  RealElement draw_multiplicative_mask() {
    const bool negative = (engine_() >> 63) != 0;
    const double mag = policy_.mult_floor + (policy_.mult_bound - policy_.mult_floor) * uniform01();
    return negative ? -mag : mag;
  }

 private:
  RandomnessPolicy policy_;
  std::mt19937_64 engine_;
};

}  // namespace asmpc
