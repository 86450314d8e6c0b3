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

#include <fstream>
#include <string>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/sharing.hpp"

namespace asmpc {

struct Settings {
  RandomnessPolicy masks;
  TolerancePolicy tol;

  void validate() const {
    masks.validate();
    tol.validate();
  }
};

/// Applies one `key = value` setting. `mask.profile` selects a preset and
/// should come before individual bounds.
inline void apply_setting(Settings& s, const std::string& key, const std::string& value) {
  if (key == "mask.profile") {
    const auto seed = s.masks.seed;
    if (value == "precision") {
      s.masks = RandomnessPolicy::precision();
    } else if (value == "wide") {
      s.masks = RandomnessPolicy::wide();
    } else {
      fail(ErrorCode::kConfig, "mask.profile must be precision or wide");
    }
    s.masks.seed = seed;
    return;
  }
  double v = 0.0;
  if (!parse_real(value, v)) fail(ErrorCode::kConfig, key + ": '" + value + "' is not a finite number");
  if (key == "mask.additive_bound") {
    s.masks.additive_bound = v;
  } else if (key == "mask.mult_bound") {
    s.masks.mult_bound = v;
  } else if (key == "mask.mult_floor") {
    s.masks.mult_floor = v;
  } else if (key == "tol.delta") {
    s.tol.delta = v;
  } else if (key == "tol.zero_guard") {
    s.tol.zero_guard = v;
  } else if (key == "tol.oracle_rel_tol") {
    s.tol.oracle_rel_tol = v;
  } else {
    fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }
}

/// Reads `key = value` lines; `#` starts a comment.
inline void load_config(Settings& s, std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(s, std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
  }
}

inline void load_config_file(Settings& s, const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kConfig, "cannot read config " + path);
  load_config(s, is);
}

}  // namespace asmpc
