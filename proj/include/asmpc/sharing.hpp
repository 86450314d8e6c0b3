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

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"

namespace asmpc {

enum class PartyId : std::uint8_t { kP1 = 1, kP2 = 2 };

constexpr int party_number(PartyId p) { return static_cast<int>(p); }
constexpr PartyId peer_of(PartyId p) { return p == PartyId::kP1 ? PartyId::kP2 : PartyId::kP1; }

inline PartyId party_from_int(long v) {
  if (v == 1) return PartyId::kP1;
  if (v == 2) return PartyId::kP2;
  fail(ErrorCode::kUsage, "party must be 1 or 2, got " + std::to_string(v));
}

enum class ShareKind : char { kAdditive = 'A', kMultiplicative = 'M' };

/// <x>: x = share_p1 + share_p2.
struct AdditiveSharing {
  RealElement share_p1 = 0.0;
  RealElement share_p2 = 0.0;

  RealElement share(PartyId p) const { return p == PartyId::kP1 ? share_p1 : share_p2; }
};

/// [[u]]: u = share_p1 * share_p2.
struct MultiplicativeSharing {
  RealElement share_p1 = 1.0;
  RealElement share_p2 = 1.0;

  RealElement share(PartyId p) const { return p == PartyId::kP1 ? share_p1 : share_p2; }
};

inline AdditiveSharing share_additive(RealElement secret, MaskSampler& rng) {
  require_finite(secret, ErrorCode::kInvalidSecret, "secret");
  const RealElement s1 = rng.draw_additive_mask();
  return {s1, secret - s1};
}

inline MultiplicativeSharing share_multiplicative(RealElement secret, MaskSampler& rng) {
  require_finite(secret, ErrorCode::kInvalidSecret, "secret");
  if (secret == 0.0) {
    fail(ErrorCode::kZeroSecretUnderMss, "zero cannot be shared multiplicatively");
  }
  const RealElement s1 = rng.draw_multiplicative_mask();
  return {s1, secret / s1};
}

inline RealElement reveal(const AdditiveSharing& s) { return s.share_p1 + s.share_p2; }
inline RealElement reveal(const MultiplicativeSharing& s) { return s.share_p1 * s.share_p2; }

/// Shortest decimal text that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Parses a finite decimal; returns false on any trailing junk.
inline bool parse_real(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

/// One line of a share file: `id,kind,party,value`.
struct ShareRecord {
  std::string id;
  ShareKind kind = ShareKind::kAdditive;
  PartyId party = PartyId::kP1;
  RealElement value = 0.0;

  bool operator==(const ShareRecord&) const = default;
};

inline void write_share_records(std::ostream& os, const std::vector<ShareRecord>& records) {
  for (const auto& r : records) {
    os << r.id << ',' << static_cast<char>(r.kind) << ',' << party_number(r.party) << ','
       << format_real(r.value) << '\n';
  }
}

inline std::vector<ShareRecord> read_share_records(std::istream& is) {
  std::vector<ShareRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto bad = [&](const std::string& why) {
      fail(ErrorCode::kShareFileCorrupt, "line " + std::to_string(lineno) + ": " + why);
    };
    auto fields = split(body, ',');
    if (fields.size() != 4) bad("expected id,kind,party,value");
    ShareRecord r;
    r.id = std::string(trim(fields[0]));
    if (r.id.empty()) bad("empty id");
    const auto kind = trim(fields[1]);
    if (kind == "A") {
      r.kind = ShareKind::kAdditive;
    } else if (kind == "M") {
      r.kind = ShareKind::kMultiplicative;
    } else {
      bad("kind must be A or M");
    }
    const auto party = trim(fields[2]);
    if (party == "1") {
      r.party = PartyId::kP1;
    } else if (party == "2") {
      r.party = PartyId::kP2;
    } else {
      bad("party must be 1 or 2");
    }
    if (!parse_real(fields[3], r.value)) bad("value is not a finite decimal");
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_share_file(const std::string& path, const std::vector<ShareRecord>& records) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kUsage, "cannot write " + path);
  write_share_records(os, records);
}

inline std::vector<ShareRecord> read_share_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kUsage, "cannot read " + path);
  return read_share_records(is);
}

/// Plaintext bindings, one `name = value` per line.
using PlainValues = std::vector<std::pair<std::string, RealElement>>;

inline PlainValues read_plain_values(std::istream& is) {
  PlainValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    double v = 0.0;
    if (eq == std::string_view::npos || trim(body.substr(0, eq)).empty() ||
        !parse_real(body.substr(eq + 1), v)) {
      fail(ErrorCode::kUsage, "inputs line " + std::to_string(lineno) + ": expected name = value");
    }
    out.emplace_back(std::string(trim(body.substr(0, eq))), v);
  }
  return out;
}

inline PlainValues read_plain_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kUsage, "cannot read " + path);
  return read_plain_values(is);
}

}  // namespace asmpc
