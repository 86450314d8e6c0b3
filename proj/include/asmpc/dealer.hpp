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
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/sharing.hpp"

namespace asmpc {

/// Beaver triple with every component additively shared.
struct StandardTriple {
  AdditiveSharing a;
  AdditiveSharing b;
  AdditiveSharing c;
};

/// Resharing triple: P1 holds a, P2 holds b, c = a*b is additively shared.
struct ResharingTriple {
  RealElement a_plain = 1.0;
  RealElement b_plain = 1.0;
  AdditiveSharing c;
};

/// One party's view of a standard triple.
struct StandardTripleShare {
  std::uint64_t id = 0;
  RealElement a = 0.0;
  RealElement b = 0.0;
  RealElement c = 0.0;

  bool operator==(const StandardTripleShare&) const = default;
};

/// One party's view of a resharing triple. `mask` is a for P1 and b for P2.
struct ResharingTripleShare {
  std::uint64_t id = 0;
  RealElement mask = 1.0;
  RealElement c = 0.0;

  bool operator==(const ResharingTripleShare&) const = default;
};

struct TripleSlice {
  PartyId party = PartyId::kP1;
  std::uint64_t session = 0;
  std::vector<StandardTripleShare> standard;
  std::vector<ResharingTripleShare> resharing;

  bool operator==(const TripleSlice&) const = default;
};

struct DealtTriples {
  TripleSlice p1;
  TripleSlice p2;
};

inline StandardTriple make_standard_triple(MaskSampler& rng) {
  StandardTriple t;
  t.a = share_additive(rng.draw_additive_mask(), rng);
  t.b = share_additive(rng.draw_additive_mask(), rng);
  // c is formed from the reconstructed a and b so the triple identity holds
  // for the values the parties actually hold.
  t.c = share_additive(reveal(t.a) * reveal(t.b), rng);
  return t;
}

inline ResharingTriple make_resharing_triple(MaskSampler& rng) {
  ResharingTriple t;
  t.a_plain = rng.draw_multiplicative_mask();
  t.b_plain = rng.draw_multiplicative_mask();
  t.c = share_additive(t.a_plain * t.b_plain, rng);
  return t;
}

inline DealtTriples generate_triples(std::size_t count_standard, std::size_t count_resharing,
                                     const RandomnessPolicy& policy, std::uint64_t session = 0) {
  MaskSampler rng(policy, /*stream=*/1);
  DealtTriples out;
  out.p1.party = PartyId::kP1;
  out.p2.party = PartyId::kP2;
  out.p1.session = out.p2.session = session;
  out.p1.standard.reserve(count_standard);
  out.p2.standard.reserve(count_standard);
  for (std::size_t i = 0; i < count_standard; ++i) {
    const auto t = make_standard_triple(rng);
    out.p1.standard.push_back({i, t.a.share_p1, t.b.share_p1, t.c.share_p1});
    out.p2.standard.push_back({i, t.a.share_p2, t.b.share_p2, t.c.share_p2});
  }
  out.p1.resharing.reserve(count_resharing);
  out.p2.resharing.reserve(count_resharing);
  for (std::size_t i = 0; i < count_resharing; ++i) {
    const auto t = make_resharing_triple(rng);
    out.p1.resharing.push_back({i, t.a_plain, t.c.share_p1});
    out.p2.resharing.push_back({i, t.b_plain, t.c.share_p2});
  }
  return out;
}

/// Single-use triple supply for one party. Cursor advancement is serialized.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(TripleSlice slice) : slice_(std::move(slice)) {}

  TripleStore(TripleStore&& other) noexcept
      : slice_(std::move(other.slice_)),
        next_standard_(other.next_standard_),
        next_resharing_(other.next_resharing_) {}

  PartyId party() const { return slice_.party; }
  std::uint64_t session() const { return slice_.session; }

  StandardTripleShare next_standard() {
    std::lock_guard lock(mu_);
    if (next_standard_ >= slice_.standard.size()) {
      fail(ErrorCode::kTripleExhausted, "no standard triple left (" +
                                            std::to_string(slice_.standard.size()) + " provisioned)");
    }
    return slice_.standard[next_standard_++];
  }

  ResharingTripleShare next_resharing() {
    std::lock_guard lock(mu_);
    if (next_resharing_ >= slice_.resharing.size()) {
      fail(ErrorCode::kTripleExhausted, "no resharing triple left (" +
                                            std::to_string(slice_.resharing.size()) + " provisioned)");
    }
    return slice_.resharing[next_resharing_++];
  }

  std::size_t remaining_standard() const {
    std::lock_guard lock(mu_);
    return slice_.standard.size() - next_standard_;
  }

  std::size_t remaining_resharing() const {
    std::lock_guard lock(mu_);
    return slice_.resharing.size() - next_resharing_;
  }

  /// Id the next draw would return, or UINT64_MAX when exhausted.
  std::uint64_t peek_standard_id() const {
    std::lock_guard lock(mu_);
    return next_standard_ < slice_.standard.size() ? slice_.standard[next_standard_].id : UINT64_MAX;
  }

  std::uint64_t peek_resharing_id() const {
    std::lock_guard lock(mu_);
    return next_resharing_ < slice_.resharing.size() ? slice_.resharing[next_resharing_].id
                                                     : UINT64_MAX;
  }

 private:
  TripleSlice slice_;
  std::size_t next_standard_ = 0;
  std::size_t next_resharing_ = 0;
  mutable std::mutex mu_;
};

inline void write_triples(std::ostream& os, const TripleSlice& slice) {
  os << "asmpc-triples v1 party=" << party_number(slice.party) << " session=" << slice.session << '\n';
  for (const auto& t : slice.standard) {
    os << "S," << t.id << ',' << format_real(t.a) << ',' << format_real(t.b) << ',' << format_real(t.c)
       << '\n';
  }
  for (const auto& t : slice.resharing) {
    os << "R," << t.id << ',' << format_real(t.mask) << ',' << format_real(t.c) << '\n';
  }
  os << "end standard=" << slice.standard.size() << " resharing=" << slice.resharing.size() << '\n';
}

namespace detail {

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

inline TripleSlice read_triples(std::istream& is) {
  TripleSlice slice;
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kTripleFileCorrupt, "line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(is, line)) {
    lineno = 1;
    bad("missing header");
  }
  lineno = 1;
  {
    std::istringstream hs(line);
    std::string magic, version, party, session;
    hs >> magic >> version >> party >> session;
    std::uint64_t p = 0;
    if (magic != "asmpc-triples" || version != "v1" || party.rfind("party=", 0) != 0 ||
        session.rfind("session=", 0) != 0 || !detail::parse_u64(party.substr(6), p) || (p != 1 && p != 2) ||
        !detail::parse_u64(session.substr(8), slice.session)) {
      bad("bad header");
    }
    slice.party = p == 1 ? PartyId::kP1 : PartyId::kP2;
  }
  bool ended = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty()) continue;
    if (ended) bad("data after end marker");
    if (body.rfind("end ", 0) == 0) {
      std::istringstream es{std::string(body)};
      std::string word, s, r;
      es >> word >> s >> r;
      std::uint64_t ns = 0, nr = 0;
      if (s.rfind("standard=", 0) != 0 || r.rfind("resharing=", 0) != 0 ||
          !detail::parse_u64(s.substr(9), ns) || !detail::parse_u64(r.substr(10), nr)) {
        bad("bad end marker");
      }
      if (ns != slice.standard.size() || nr != slice.resharing.size()) bad("record count mismatch");
      ended = true;
      continue;
    }
    auto f = split(body, ',');
    if (f[0] == "S") {
      StandardTripleShare t;
      if (f.size() != 5 || !detail::parse_u64(f[1], t.id) || !parse_real(f[2], t.a) ||
          !parse_real(f[3], t.b) || !parse_real(f[4], t.c)) {
        bad("bad standard record");
      }
      slice.standard.push_back(t);
    } else if (f[0] == "R") {
      ResharingTripleShare t;
      if (f.size() != 4 || !detail::parse_u64(f[1], t.id) || !parse_real(f[2], t.mask) ||
          !parse_real(f[3], t.c)) {
        bad("bad resharing record");
      }
      if (t.mask == 0.0) bad("zero resharing mask");
      slice.resharing.push_back(t);
    } else {
      bad("unknown record kind");
    }
  }
  if (!ended) {
    ++lineno;
    bad("truncated file (no end marker)");
  }
  return slice;
}

inline void write_triple_file(const TripleSlice& slice, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kUsage, "cannot write " + path);
  write_triples(os, slice);
}

inline TripleSlice read_triple_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kUsage, "cannot read " + path);
  return read_triples(is);
}

}  // namespace asmpc
