// Copyright 2026 The csg-solver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CSG_COALITION_HPP
#define CSG_COALITION_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace csg {

// Agents are 0-based internally and 1-based at every external surface
// (files, CLI, reports). Coalitions are fixed-width 64-bit bit vectors,
// which caps instances at 64 agents.
constexpr int kMaxAgents = 64;

struct Coalition {
  std::uint64_t bits = 0;

  static Coalition singleton(int agent) { return {std::uint64_t{1} << agent}; }
  static Coalition full(int n) {
    return {n >= kMaxAgents ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
  }

  bool contains(int agent) const { return (bits >> agent) & 1u; }
  void add(int agent) { bits |= std::uint64_t{1} << agent; }
  void remove(int agent) { bits &= ~(std::uint64_t{1} << agent); }

  int size() const { return std::popcount(bits); }
  bool empty() const { return bits == 0; }
  bool subset_of(Coalition other) const { return (bits & ~other.bits) == 0; }
  bool intersects(Coalition other) const { return (bits & other.bits) != 0; }

  friend bool operator==(Coalition a, Coalition b) { return a.bits == b.bits; }
  friend bool operator!=(Coalition a, Coalition b) { return a.bits != b.bits; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t m = bits; m != 0; m &= m - 1) fn(std::countr_zero(m));
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each([&](int i) { out.push_back(i); });
    return out;
  }
};

/// Lexicographic order on characteristic strings b_1 b_2 ... b_n: the
/// coalition with a 0 at the first differing agent is the smaller one.
inline bool lex_less(Coalition a, Coalition b) {
  if (a.bits == b.bits) return false;
  const int k = std::countr_zero(a.bits ^ b.bits);
  return ((a.bits >> k) & 1u) == 0;
}

struct Partition {
  std::vector<Coalition> classes;

  /// Disjoint, exhaustive over 1..n, no empty class.
  bool valid(int n) const {
    std::uint64_t seen = 0;
    for (Coalition c : classes) {
      if (c.empty()) return false;
      if (c.bits & seen) return false;
      seen |= c.bits;
    }
    return seen == Coalition::full(n).bits;
  }

  /// Canonical form: classes ordered by their smallest member.
  Partition normalized() const {
    Partition p = *this;
    std::sort(p.classes.begin(), p.classes.end(), [](Coalition a, Coalition b) {
      return std::countr_zero(a.bits) < std::countr_zero(b.bits);
    });
    return p;
  }
};

inline Partition singletons_partition(int n) {
  Partition p;
  p.classes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p.classes.push_back(Coalition::singleton(i));
  return p;
}

}  // namespace csg

#endif  // CSG_COALITION_HPP
