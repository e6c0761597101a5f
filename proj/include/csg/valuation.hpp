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

#ifndef CSG_VALUATION_HPP
#define CSG_VALUATION_HPP

#include <bit>
#include <cstdint>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"

namespace csg {

// Coalition values are doubles throughout. Correlation values are multiples
// of 1/2, which doubles represent and add exactly at these magnitudes, so
// equality checks on them are exact.

/// Sum of the weights of the edges with both endpoints in c.
inline double edge_sum_value(const Instance& inst, Coalition c) {
  double total = 0.0;
  for (const Edge& e : inst.edges())
    if (c.contains(e.i) && c.contains(e.j)) total += e.weight;
  return total;
}

/// Intra-plus edges count once, minus cut edges count 1/2 from the inside
/// endpoint: v(C) = Intra+(C) + Inter-(C)/2.
inline double correlation_value(const Instance& inst, Coalition c) {
  std::int64_t twice_intra_plus = 0;
  std::int64_t inter_minus = 0;
  const std::uint64_t inside = c.bits;
  c.for_each([&](int i) {
    twice_intra_plus += std::popcount(inst.plus_adjacency(i).bits & inside);
    inter_minus += std::popcount(inst.minus_adjacency(i).bits & ~inside);
  });
  return static_cast<double>(twice_intra_plus) / 2.0 +
         static_cast<double>(inter_minus) / 2.0;
}

/// Triple-sum form: sum over ordered pairs i,j in C of
/// w_ij * sum_{k not in C} w_ik w_jk. With unit weights this counts, per
/// member i, the edges jk leaving C whose endpoints are both adjacent to i.
inline double coordination_value(const Instance& inst, Coalition c) {
  const int n = inst.n();
  double total = 0.0;
  if (inst.unit_weights()) {
    for (const Edge& e : inst.edges()) {
      if (!c.contains(e.i) || !c.contains(e.j)) continue;
      const std::uint64_t common =
          inst.adjacency(e.i).bits & inst.adjacency(e.j).bits & ~c.bits;
      total += 2.0 * std::popcount(common);
    }
    return total;
  }
  for (const Edge& e : inst.edges()) {
    if (!c.contains(e.i) || !c.contains(e.j)) continue;
    double outer = 0.0;
    for (int k = 0; k < n; ++k)
      if (!c.contains(k)) outer += inst.weight(e.i, k) * inst.weight(e.j, k);
    total += 2.0 * e.weight * outer;
  }
  return total;
}

inline double coalition_value(const Instance& inst, Coalition c) {
  switch (inst.kind()) {
    case ValuationKind::edge_sum: return edge_sum_value(inst, c);
    case ValuationKind::correlation: return correlation_value(inst, c);
    case ValuationKind::coordination: return coordination_value(inst, c);
  }
  return 0.0;
}

inline double structure_value(const Instance& inst, const Partition& p) {
  double total = 0.0;
  for (Coalition c : p.classes) total += coalition_value(inst, c);
  return total;
}

}  // namespace csg

#endif  // CSG_VALUATION_HPP
