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

#ifndef CSG_MASTER_HPP
#define CSG_MASTER_HPP

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/simplex.hpp"
#include "csg/util.hpp"
#include "csg/valuation.hpp"

namespace csg {

struct Column {
  Coalition coalition;
  double value = 0.0;  // v(C_j)
  int id = 0;          // dense index j
};

/// A column candidate coming back from a pricer, with its reduced cost
/// under the duals it was priced against.
struct PricedColumn {
  Coalition coalition;
  double value = 0.0;
  double reduced_cost = 0.0;
};

/// Duals are passed around in the minimization-dual convention (see the
/// MasterModel notes), one entry per agent; entries of covered agents are
/// zero.
using Pricer = std::function<std::vector<PricedColumn>(const std::vector<double>&)>;

/// Reduced cost of a column: v(C) + sum of pi over C's members. A column
/// improves the RMP iff this exceeds the pricing tolerance.
inline double reduced_cost(Coalition c, double value, const std::vector<double>& pi) {
  double rc = value;
  c.for_each([&](int i) { rc += pi[i]; });
  return rc;
}

inline double reduced_cost(const Column& col, const std::vector<double>& pi) {
  return reduced_cost(col.coalition, col.value, pi);
}

enum class RmpStatus { optimal, infeasible, iteration_limit };

/// Restricted master problem over the free agents of a node:
///
///   max sum_j v(C_j) x_j   s.t.  sum_j a_ij x_j = 1 for every free agent i
///
/// The LP is kept in maximization form throughout. Reported duals follow
/// the minimization-form convention, pi_i = -y_i for the maximization row
/// prices y, so that reduced_cost() above is the quantity that must be
/// driven non-positive.
class MasterModel {
 public:
  MasterModel(const Instance& inst, Coalition free_set)
      : inst_(&inst), free_(free_set), lp_(free_set.size()) {
    for (int a = 0; a < kMaxAgents; ++a) agent_row_[a] = -1;
    free_.for_each([&](int agent) {
      agent_row_[agent] = static_cast<int>(row_agents_.size());
      row_agents_.push_back(agent);
    });
  }

  const Instance& instance() const { return *inst_; }
  Coalition free_set() const { return free_; }
  int row_count() const { return static_cast<int>(row_agents_.size()); }
  const std::vector<Column>& columns() const { return columns_; }
  bool has_column(Coalition c) const { return mask_to_id_.count(c.bits) > 0; }

  /// Rejects duplicates (returns false); throws on structurally invalid
  /// columns (empty or leaving the free set).
  bool add_column(Coalition c, double value) {
    if (c.empty()) throw std::invalid_argument("master: empty column");
    if (!c.subset_of(free_))
      throw std::invalid_argument("master: column outside free agents");
    if (mask_to_id_.count(c.bits)) return false;
    assert(std::fabs(value - coalition_value(*inst_, c)) <= 1e-6);
    const int id = static_cast<int>(columns_.size());
    columns_.push_back({c, value, id});
    mask_to_id_.emplace(c.bits, id);
    std::uint64_t row_mask = 0;
    c.for_each([&](int agent) { row_mask |= std::uint64_t{1} << agent_row_[agent]; });
    lp_.add_column(row_mask, value);
    if (c.size() == 1) singleton_col_[std::countr_zero(c.bits)] = id;
    solved_ = false;
    return true;
  }

  RmpStatus solve() {
    if (solved_) return RmpStatus::optimal;
    std::vector<int> warm = warm_basis_candidate();
    DenseSimplex::Result res = lp_.solve(warm);
    switch (res.status) {
      case DenseSimplex::Status::optimal: break;
      case DenseSimplex::Status::infeasible:
        // After singleton columns are branched to zero, a node model can
        // lose every cover of an agent; keep the phase-1 prices so Farkas
        // pricing can restore feasibility (or certify it cannot).
        farkas_pi_.assign(static_cast<std::size_t>(inst_->n()), 0.0);
        for (int r = 0; r < row_count(); ++r)
          farkas_pi_[row_agents_[r]] = -res.y[r];
        return RmpStatus::infeasible;
      case DenseSimplex::Status::iteration_limit: return RmpStatus::iteration_limit;
      case DenseSimplex::Status::unbounded:
        throw Error("master: unbounded RMP (corrupt model)");
    }
    x_ = std::move(res.x);
    objective_ = res.objective;
    pi_.assign(static_cast<std::size_t>(inst_->n()), 0.0);
    for (int r = 0; r < row_count(); ++r) pi_[row_agents_[r]] = -res.y[r];
    basis_masks_.clear();
    for (int j : lp_.basis())
      if (j >= 0 && j < static_cast<int>(columns_.size()))
        basis_masks_.push_back(columns_[j].coalition.bits);
    solved_ = true;
    return RmpStatus::optimal;
  }

  /// Primal values per column id (valid after solve()).
  const std::vector<double>& primal() const { return x_; }
  /// Paper-convention duals per agent (zero on covered agents).
  const std::vector<double>& duals() const { return pi_; }
  /// Phase-1 prices per agent from the last infeasible solve; a coalition
  /// reduces the infeasibility iff their sum over it is positive.
  const std::vector<double>& farkas_duals() const { return farkas_pi_; }
  double objective() const { return objective_; }
  bool solved() const { return solved_; }

  /// Column-generation loop: solve, price, add, repeat until no candidate
  /// prices out above eps_price. An infeasible restricted model is repaired
  /// through `farkas_pricer` first; if that stalls the node is genuinely
  /// infeasible and the model is left unsolved (solved() == false). The
  /// round cap only exists to turn a non-terminating pricer into an error.
  long generate_columns(const Pricer& pricer, double eps_price,
                        const std::function<bool()>& interrupted = {},
                        const Pricer& farkas_pricer = {}) {
    const int nf = free_.size();
    const unsigned long long cap =
        nf < 50 ? 10ULL * (1ULL << nf) : ~0ULL;
    long added = 0;
    for (unsigned long long round = 0;; ++round) {
      if (round > cap) throw Error("master: column generation exceeded round cap");
      RmpStatus st = solve();
      if (st == RmpStatus::iteration_limit)
        throw Error("master: simplex iteration limit during column generation");
      if (st == RmpStatus::infeasible) {
        if (!farkas_pricer)
          throw Error("master: infeasible RMP during column generation");
        long repaired = 0;
        for (const PricedColumn& cand : farkas_pricer(farkas_pi_)) {
          if (cand.reduced_cost <= 1e-9) continue;
          if (!add_column(cand.coalition, cand.value))
            throw Error("master: farkas pricer returned an existing column");
          ++repaired;
        }
        if (repaired == 0) return added;  // no column can restore coverage
        added += repaired;
        continue;
      }
      if (interrupted && interrupted()) break;
      if (row_count() == 0) break;
      long this_round = 0;
      for (const PricedColumn& cand : pricer(pi_)) {
        if (cand.reduced_cost <= eps_price) continue;
        if (!add_column(cand.coalition, cand.value))
          throw Error("master: pricer returned an existing column");
        ++this_round;
      }
      if (this_round == 0) break;
      added += this_round;
    }
    return added;
  }

  /// Debug dump of the current RMP in LP-file syntax.
  void dump_lp(std::ostream& out) const {
    out << "\\ RMP over " << row_count() << " agents, " << columns_.size()
        << " columns\nMaximize\n obj:";
    char buf[64];
    for (const Column& col : columns_) {
      std::snprintf(buf, sizeof buf, " %+.17g x%d", col.value, col.id + 1);
      out << buf;
    }
    out << "\nSubject To\n";
    for (int r = 0; r < row_count(); ++r) {
      out << " c" << (row_agents_[r] + 1) << ":";
      bool first = true;
      for (const Column& col : columns_) {
        if (!col.coalition.contains(row_agents_[r])) continue;
        out << (first ? " x" : " + x") << (col.id + 1);
        first = false;
      }
      out << " = 1\n";
    }
    out << "End\n";
  }

 private:
  std::vector<int> warm_basis_candidate() const {
    std::vector<int> basis;
    basis.reserve(static_cast<std::size_t>(row_count()));
    if (!basis_masks_.empty()) {
      for (std::uint64_t mask : basis_masks_) {
        auto it = mask_to_id_.find(mask);
        if (it == mask_to_id_.end()) break;
        basis.push_back(it->second);
      }
      if (static_cast<int>(basis.size()) == row_count()) return basis;
      basis.clear();
    }
    for (int agent : row_agents_) {
      auto it = singleton_col_.find(agent);
      if (it == singleton_col_.end()) return {};  // phase 1 will sort it out
      basis.push_back(it->second);
    }
    return basis;
  }

  const Instance* inst_;
  Coalition free_;
  std::vector<int> row_agents_;
  int agent_row_[kMaxAgents];
  std::vector<Column> columns_;
  std::unordered_map<std::uint64_t, int> mask_to_id_;
  std::unordered_map<int, int> singleton_col_;
  DenseSimplex lp_;

  std::vector<double> x_;
  std::vector<double> pi_;
  std::vector<double> farkas_pi_;
  std::vector<std::uint64_t> basis_masks_;
  double objective_ = 0.0;
  bool solved_ = false;
};

/// Root RMP: exactly the n singleton columns, so the all-singletons
/// structure is a feasible basic start.
inline MasterModel build_root_rmp(const Instance& inst) {
  MasterModel m(inst, Coalition::full(inst.n()));
  for (int i = 0; i < inst.n(); ++i) {
    const Coalition c = Coalition::singleton(i);
    m.add_column(c, coalition_value(inst, c));
  }
  return m;
}

}  // namespace csg

#endif  // CSG_MASTER_HPP
