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

#ifndef CSG_BNB_HPP
#define CSG_BNB_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/master.hpp"
#include "csg/pricing.hpp"
#include "csg/report.hpp"
#include "csg/util.hpp"
#include "csg/valuation.hpp"

namespace csg {

struct SolveConfig {
  std::optional<long> node_limit;              // unset: run to proven optimality
  double eps_int = 1e-6;                       // integrality tolerance
  double eps_price = 1e-6;                     // pricing tolerance
  std::pair<double, double> branch_window = {0.35, 0.65};
  std::optional<double> time_limit;            // CPU seconds
  bool explore_one_first = true;               // DFS order: x_j = 1 child first
  int top_k = 1;                               // columns added per pricing round
  bool collect_trace = false;

  /// Mimics the experimental setup: at most 40 tree nodes.
  static SolveConfig paper_mode() {
    SolveConfig cfg;
    cfg.node_limit = 40;
    return cfg;
  }

  void validate() const {
    if (eps_int <= 0 || eps_int >= 1e-2 || eps_price <= 0 || eps_price >= 1e-2)
      throw std::invalid_argument("config: tolerances must lie in (0, 1e-2)");
    if (!(branch_window.first > 0 && branch_window.second < 1 &&
          branch_window.first < 0.5 && branch_window.second > 0.5))
      throw std::invalid_argument("config: branch window must contain 0.5 inside (0,1)");
    if (top_k < 1 || top_k > 5)
      throw std::invalid_argument("config: top_k must be in 1..5");
    if (node_limit && *node_limit < 1)
      throw std::invalid_argument("config: node limit must be >= 1");
  }
};

/// One branch-and-bound node: reduced master over the free agents plus the
/// path decisions that produced it.
struct NodeState {
  MasterModel model;
  Coalition covered;  // U
  std::vector<std::pair<Coalition, int>> decisions;
  std::vector<Column> fixed_one;           // columns fixed to 1 along the path
  std::vector<Coalition> forbidden_extra;  // fixed to 0, still within U'
  double fixed_value = 0.0;
  int depth = 0;

  Coalition free() const { return model.free_set(); }
};

inline NodeState make_root_node(const Instance& inst) {
  return NodeState{build_root_rmp(inst), Coalition{}, {}, {}, {}, 0.0, 0};
}

/// Step (1) of the node build: fixing x_j = 1 covers C_j and drops every
/// column touching the new U together with U's covering rows; fixing
/// x_j = 0 removes the column and forbids regenerating it.
inline NodeState fix_and_reduce(const Instance& inst, const NodeState& parent,
                                int column_id, int val) {
  if (column_id < 0 || column_id >= static_cast<int>(parent.model.columns().size()))
    throw std::invalid_argument("fix_and_reduce: unknown column");
  if (val != 0 && val != 1)
    throw std::invalid_argument("fix_and_reduce: value must be 0 or 1");
  const Column& fixed = parent.model.columns()[column_id];
  if (val == 1 && fixed.coalition.intersects(parent.covered))
    throw std::invalid_argument("fix_and_reduce: column intersects covered agents");

  Coalition covered = parent.covered;
  Coalition free = parent.free();
  if (val == 1) {
    covered.bits |= fixed.coalition.bits;
    free.bits &= ~fixed.coalition.bits;
  }

  NodeState child{MasterModel(inst, free), covered, parent.decisions,
                  parent.fixed_one,        {},      parent.fixed_value,
                  parent.depth + 1};
  child.decisions.emplace_back(fixed.coalition, val);
  if (val == 1) {
    child.fixed_one.push_back(fixed);
    child.fixed_value += fixed.value;
  }
  for (const Column& col : parent.model.columns()) {
    if (val == 0 && col.id == column_id) continue;
    if (!col.coalition.subset_of(free)) continue;
    child.model.add_column(col.coalition, col.value);
  }
  for (Coalition c : parent.forbidden_extra)
    if (c.subset_of(free)) child.forbidden_extra.push_back(c);
  if (val == 0) child.forbidden_extra.push_back(fixed.coalition);
  return child;
}

/// Fractional column to branch on: prefer the window around 0.5, closest
/// to 0.5, ties to the larger coalition then the smaller id. Returns
/// nothing iff the solution is integral.
inline std::optional<int> select_branching_variable(
    const MasterModel& model, const std::vector<double>& x,
    const SolveConfig& cfg = {}) {
  int best = -1;
  bool best_in_window = false;
  double best_dist = 2.0;
  for (const Column& col : model.columns()) {
    const double xj = x[col.id];
    if (xj <= cfg.eps_int || xj >= 1.0 - cfg.eps_int) continue;
    const bool in_window =
        xj > cfg.branch_window.first && xj < cfg.branch_window.second;
    const double dist = std::fabs(xj - 0.5);
    if (best >= 0 && best_in_window && !in_window) continue;
    bool take = best < 0 || (in_window && !best_in_window);
    if (!take && in_window == best_in_window) {
      if (dist < best_dist - 1e-12) {
        take = true;
      } else if (dist < best_dist + 1e-12) {
        const Column& incumbent = model.columns()[best];
        take = col.coalition.size() > incumbent.coalition.size();
      }
    }
    if (take) {
      best = col.id;
      best_in_window = in_window;
      best_dist = dist;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

enum class Fathom { integral, bounded, open };

/// Classification of a node solved to (column-generation) optimality.
/// `node_value` includes the path's fixed contribution.
inline Fathom fathom_check(const MasterModel& model, double node_value,
                           double incumbent, const SolveConfig& cfg = {}) {
  if (node_value <= incumbent + 1e-6) return Fathom::bounded;
  return select_branching_variable(model, model.primal(), cfg) ? Fathom::open
                                                               : Fathom::integral;
}

namespace detail {

struct Budget {
  std::optional<long> node_limit;
  std::optional<double> time_limit;
  double t_start = 0.0;
  long nodes = 0;
  bool exhausted = false;

  bool time_up() const {
    return time_limit && cpu_seconds() - t_start > *time_limit;
  }
  bool may_open_node() {
    if ((node_limit && nodes >= *node_limit) || time_up()) {
      exhausted = true;
      return false;
    }
    return true;
  }
};

struct TreeSearch {
  const Instance& inst;
  const SolveConfig& cfg;
  SolveReport& rep;
  Budget budget;
  double incumbent_value;
  Partition incumbent;
  std::unordered_set<std::uint64_t> all_columns;

  void note_columns(const MasterModel& model) {
    for (const Column& col : model.columns()) all_columns.insert(col.coalition.bits);
  }

  void offer_incumbent(const Partition& p) {
    // Scored on the canonical class order so the reported value is exactly
    // the structure value of the reported partition (not the LP objective).
    Partition canon = p.normalized();
    const double v = structure_value(inst, canon);
    if (v > incumbent_value) {
      incumbent_value = v;
      incumbent = std::move(canon);
    }
  }

  void process(NodeState& node, long parent_trace) {
    if (!budget.may_open_node()) return;
    ++budget.nodes;
    const long node_index = budget.nodes;
    const bool is_root = node_index == 1;

    node.model.generate_columns(
        make_pricer(inst, node.model, node.covered, node.forbidden_extra, cfg.top_k),
        cfg.eps_price, [this] { return budget.time_up(); },
        make_farkas_pricer(inst, node.model, node.forbidden_extra));
    note_columns(node.model);
    if (!node.model.solved()) {
      // No column can cover some agent within this node's fixings: the
      // node has no feasible completion at all.
      return;
    }
    if (budget.time_up()) {
      budget.exhausted = true;
      if (is_root) {
        rep.lp_root = node.fixed_value + node.model.objective();
        rep.time_root = cpu_seconds() - budget.t_start;
      }
      return;
    }

    const double node_value = node.fixed_value + node.model.objective();
    if (is_root) {
      rep.lp_root = node_value;
      rep.time_root = cpu_seconds() - budget.t_start;
    }

    long trace_idx = -1;
    if (cfg.collect_trace) {
      trace_idx = static_cast<long>(rep.trace.size());
      rep.trace.push_back({node.depth, parent_trace, node_value, false});
    }

    const Fathom outcome = fathom_check(node.model, node_value, incumbent_value, cfg);
    switch (outcome) {
      case Fathom::bounded:
        return;
      case Fathom::integral: {
        Partition p;
        for (const Column& col : node.fixed_one) p.classes.push_back(col.coalition);
        for (const Column& col : node.model.columns())
          if (node.model.primal()[col.id] >= 1.0 - cfg.eps_int)
            p.classes.push_back(col.coalition);
        if (!p.valid(inst.n()))
          throw Error("bnb: integral LP solution did not assemble into a partition");
        ++rep.int_solutions;
        if (cfg.collect_trace) rep.trace[trace_idx].integral = true;
        offer_incumbent(p);
        return;
      }
      case Fathom::open:
        break;
    }

    const int j = *select_branching_variable(node.model, node.model.primal(), cfg);
    const int first = cfg.explore_one_first ? 1 : 0;
    for (int round = 0; round < 2; ++round) {
      const int val = round == 0 ? first : 1 - first;
      NodeState child = fix_and_reduce(inst, node, j, val);
      process(child, trace_idx);
    }
  }
};

}  // namespace detail

/// Full solve: root column generation, then depth-first branch and bound
/// with fractional branching around 0.5. Without limits the result is the
/// proven optimum; with a node or time limit it is the incumbent plus the
/// root LP bound, flagged not proven.
inline SolveReport solve(const Instance& inst, const SolveConfig& cfg = {}) {
  cfg.validate();
  const double t0 = cpu_seconds();

  SolveReport rep;
  rep.name = inst.name();
  rep.kind = inst.kind();
  rep.n = inst.n();

  detail::TreeSearch search{inst, cfg, rep,
                            detail::Budget{cfg.node_limit, cfg.time_limit, t0},
                            0.0,  {},  {}};
  search.incumbent = singletons_partition(inst.n()).normalized();
  search.incumbent_value = structure_value(inst, search.incumbent);

  NodeState root = make_root_node(inst);
  search.process(root, -1);

  rep.best_int = search.incumbent_value;
  rep.best_partition = search.incumbent;  // already canonical
  rep.gap = compute_gap(rep.lp_root, rep.best_int);
  rep.nodes = search.budget.nodes;
  rep.columns_total = static_cast<long>(search.all_columns.size());
  rep.proven = !search.budget.exhausted;
  rep.time_total = cpu_seconds() - t0;
  rep.time_per_node = rep.nodes > 0 ? rep.time_total / static_cast<double>(rep.nodes)
                                    : rep.time_total;
  return rep;
}

}  // namespace csg

#endif  // CSG_BNB_HPP
