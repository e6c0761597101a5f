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

#ifndef CSG_ORACLE_HPP
#define CSG_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/report.hpp"
#include "csg/util.hpp"
#include "csg/valuation.hpp"

namespace csg {

/// Visits every set partition of {0..n-1} exactly once, in lexicographic
/// order of the restricted growth strings, passing the class list to fn.
/// Deliberately plain: this is the ground truth the solver is tested
/// against, so no pruning and no cleverness.
template <typename Fn>
void for_each_partition(int n, Fn&& fn) {
  std::vector<Coalition> classes;
  if (n == 0) {
    fn(classes);  // the empty partition
    return;
  }
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  while (true) {
    int num_classes = 0;
    for (int v : rgs) num_classes = std::max(num_classes, v + 1);
    classes.assign(static_cast<std::size_t>(num_classes), Coalition{});
    for (int i = 0; i < n; ++i) classes[rgs[i]].add(i);
    fn(classes);

    // Successor: bump the rightmost symbol that may still grow
    // (rgs[i] <= max of the prefix), reset the tail to zero.
    int i = n - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) break;
    }
    if (i == 0) return;
    ++rgs[i];
    for (int j = i + 1; j < n; ++j) rgs[j] = 0;
  }
}

struct OracleResult {
  double best_value = 0.0;
  Partition best_partition;
  std::uint64_t partitions_scanned = 0;  // = Bell(n)
};

/// Exhaustive optimum by scanning all partitions. Guarded at n <= 14
/// (Bell(14) is about 1.9e8).
inline OracleResult enumerate_optimum(const Instance& inst) {
  if (inst.n() > 14)
    throw std::invalid_argument("oracle: n > 14 (Bell number too large)");
  OracleResult res;
  bool first = true;
  for_each_partition(inst.n(), [&](const std::vector<Coalition>& classes) {
    ++res.partitions_scanned;
    double v = 0.0;
    for (Coalition c : classes) v += coalition_value(inst, c);
    if (first || v > res.best_value) {  // ties keep the earlier growth string
      first = false;
      res.best_value = v;
      res.best_partition.classes = classes;
    }
  });
  return res;
}

struct VerifyResult {
  bool pass = true;
  double oracle_value = 0.0;
  double value_delta = 0.0;  // report.best_int - oracle optimum
  bool bound_ok = true;      // lp_root >= oracle optimum - 1e-6
  std::string detail;
};

/// Checks a solver report against the enumeration oracle: the incumbent
/// must match the true optimum (exactly for correlation, 1e-6 otherwise)
/// and the root LP must dominate it.
inline VerifyResult verify_report(const Instance& inst, const SolveReport& r) {
  const OracleResult oracle = enumerate_optimum(inst);
  VerifyResult v;
  v.oracle_value = oracle.best_value;
  v.value_delta = r.best_int - oracle.best_value;
  const double tol = inst.kind() == ValuationKind::correlation ? 0.0 : 1e-6;
  if (std::fabs(v.value_delta) > tol) {
    v.pass = false;
    v.detail = "best_int " + std::to_string(r.best_int) + " != oracle " +
               std::to_string(oracle.best_value);
  }
  if (r.lp_root < oracle.best_value - 1e-6) {
    v.pass = false;
    v.bound_ok = false;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + "lp_root " +
                std::to_string(r.lp_root) + " below optimum";
  }
  return v;
}

}  // namespace csg

#endif  // CSG_ORACLE_HPP
