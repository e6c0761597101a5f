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

#ifndef CSG_PRICING_HPP
#define CSG_PRICING_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/master.hpp"
#include "csg/util.hpp"
#include "csg/valuation.hpp"

namespace csg {

/// One pricing call: maximize v(C) + sum_{i in C} pi_i over non-empty
/// coalitions C of free agents, excluding the forbidden configurations
/// (coalitions already present as columns).
struct PricingProblem {
  Coalition free;                    // U'
  Coalition covered;                 // U, used by coordination cross terms
  std::vector<double> duals;         // per agent (size n), min-dual convention
  std::vector<Coalition> forbidden;  // each a subset of `free`
  int top_k = 1;                     // how many columns to return (<= 5)
};

struct PricingResult {
  Coalition coalition;  // best coalition; meaningless when !found
  double objective = -std::numeric_limits<double>::infinity();
  bool optimal = true;  // the engines are exact
  bool found = false;   // false: every candidate is forbidden ("no column")
  long nodes_explored = 0;
  /// Up to top_k candidates, best first (candidates[0] == coalition).
  std::vector<PricedColumn> candidates;
};

/// Glover row bounds: W-_i = sum of negative w_ij, W+_i = sum of positive
/// w_ij, with i and j ranging over `scope`.
inline std::pair<std::vector<double>, std::vector<double>> glover_bounds(
    const SquareMatrix& weights, const std::vector<int>& scope) {
  std::vector<double> lo(scope.size(), 0.0), hi(scope.size(), 0.0);
  for (std::size_t a = 0; a < scope.size(); ++a) {
    for (std::size_t b = 0; b < scope.size(); ++b) {
      const double w = weights.at(scope[a], scope[b]);
      if (w < 0.0) lo[a] += w;
      if (w > 0.0) hi[a] += w;
    }
  }
  return {std::move(lo), std::move(hi)};
}

namespace detail {

/// Shared exact engine for the pricing sub-problems, in "slot" space
/// (slot s <-> free agent agents[s]):
///
///   f(S) = sum_{s in S} lin_s + sum_{{a,b} subset S} quad_ab
///          + sum_{triples {a,b,c}: exactly two in S} two_t_abc
///
/// Edge-sum and correlation need only lin/quad; coordination adds the
/// triple terms (a triangle inside U' pays off exactly when two of its
/// corners are inside the coalition and one outside).
class QkpfEngine {
 public:
  struct Triple {
    int a, b, c;
    double two_t;
  };

  QkpfEngine(std::vector<int> agents, std::vector<double> lin, SquareMatrix quad,
             std::vector<Triple> triples, const std::vector<Coalition>& forbidden)
      : agents_(std::move(agents)),
        lin_(std::move(lin)),
        quad_(std::move(quad)),
        triples_(std::move(triples)),
        forbidden_list_(forbidden) {
    for (Coalition f : forbidden) forbidden_.insert(f.bits);
    const int k = static_cast<int>(agents_.size());
    agent_triples_.resize(static_cast<std::size_t>(k));
    for (std::size_t t = 0; t < triples_.size(); ++t) {
      agent_triples_[triples_[t].a].push_back(static_cast<int>(t));
      agent_triples_[triples_[t].b].push_back(static_cast<int>(t));
      agent_triples_[triples_[t].c].push_back(static_cast<int>(t));
    }
  }

  /// Scratch evaluation of a subset (slot mask); the brute-force oracle and
  /// the search report objectives through this one function, so both sides
  /// of the differential test share objective semantics.
  double evaluate(std::uint64_t slot_mask) const {
    double f = 0.0;
    const int k = static_cast<int>(agents_.size());
    for (int s = 0; s < k; ++s) {
      if (!((slot_mask >> s) & 1u)) continue;
      f += lin_[s];
      for (int t = s + 1; t < k; ++t)
        if ((slot_mask >> t) & 1u) f += quad_.at(s, t);
    }
    for (const Triple& tr : triples_) {
      const int in = static_cast<int>((slot_mask >> tr.a) & 1u) +
                     static_cast<int>((slot_mask >> tr.b) & 1u) +
                     static_cast<int>((slot_mask >> tr.c) & 1u);
      if (in == 2) f += tr.two_t;
    }
    return f;
  }

  Coalition to_agent_mask(std::uint64_t slot_mask) const {
    Coalition c;
    for (std::uint64_t m = slot_mask; m != 0; m &= m - 1)
      c.add(agents_[std::countr_zero(m)]);
    return c;
  }

  std::uint64_t to_slot_mask(Coalition c) const {
    std::uint64_t m = 0;
    for (std::size_t s = 0; s < agents_.size(); ++s)
      if (c.contains(agents_[s])) m |= std::uint64_t{1} << s;
    return m;
  }

  PricingResult search(int top_k) {
    const int k = static_cast<int>(agents_.size());
    top_k_ = std::max(1, std::min(top_k, 5));
    pool_.clear();
    nodes_ = 0;

    init_state();
    // Dominance preprocessing: an agent with non-positive dual, no positive
    // incident quadratic mass and no incident triple can be dropped from
    // any coalition without lowering f, so force it out up front. Because a
    // forbidden set F can make F u {i} the true optimum, the exact repair
    // pass below re-admits exactly those candidates. Skipped for top_k > 1
    // (ranks beyond the first are not preserved by the dominance argument).
    std::vector<int> pruned;
    if (top_k_ == 1) {
      for (int s = 0; s < k; ++s) {
        if (lin_[s] > 0.0 || !agent_triples_[s].empty()) continue;
        bool nonpos = true;
        for (int t = 0; t < k && nonpos; ++t)
          if (quad_.at(s, t) > 0.0) nonpos = false;
        if (nonpos) pruned.push_back(s);
      }
      for (int s : pruned) force_out(s);
    }

    dfs();

    // Repair pass for the dominance prune (see above): peel pruned agents
    // off any missed optimum one at a time. The chain either hits a
    // forbidden set first (certifying a candidate F u {i}), or bottoms out
    // at a single pruned agent (the empty set is not a valid column).
    for (const Coalition& f : forbidden_list_) {
      for (int s : pruned) {
        if (f.contains(agents_[s])) continue;
        const std::uint64_t cand = f.bits | (std::uint64_t{1} << agents_[s]);
        if (forbidden_.count(cand)) continue;
        offer(to_slot_mask(Coalition{cand}));
      }
    }
    for (int s : pruned) {
      const std::uint64_t cand = std::uint64_t{1} << agents_[s];
      if (!forbidden_.count(cand)) offer(std::uint64_t{1} << s);
    }

    PricingResult res;
    res.nodes_explored = nodes_;
    if (pool_.empty()) return res;
    res.found = true;
    for (const Entry& e : pool_) {
      const Coalition c = to_agent_mask(e.slots);
      res.candidates.push_back({c, 0.0, e.value});  // value filled by caller
    }
    res.coalition = res.candidates.front().coalition;
    res.objective = pool_.front().value;
    return res;
  }

 private:
  struct Entry {
    double value;
    std::uint64_t slots;
    Coalition agent_mask;
  };

  void init_state() {
    const int k = static_cast<int>(agents_.size());
    status_.assign(static_cast<std::size_t>(k), 0);
    s_.assign(static_cast<std::size_t>(k), 0.0);
    m_.assign(static_cast<std::size_t>(k), 0.0);
    free_.clear();
    for (int s = 0; s < k; ++s) free_.push_back(s);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (b != a) m_[a] += 0.5 * std::max(0.0, quad_.at(a, b));
    value_ = 0.0;
    live_pos_ = 0.0;
    triple_in_.assign(triples_.size(), 0);
    triple_out_.assign(triples_.size(), 0);
    for (const Triple& tr : triples_)
      if (tr.two_t > 0.0) live_pos_ += tr.two_t;
    in_mask_ = 0;
    trail_.clear();
  }

  // --- trail-based exact undo ------------------------------------------
  struct TrailEntry {
    double* where;
    double old_value;
  };

  std::size_t mark() const { return trail_.size(); }
  void set_double(double& ref, double v) {
    trail_.push_back({&ref, ref});
    ref = v;
  }
  void rewind(std::size_t mark) {
    while (trail_.size() > mark) {
      trail_.back().where[0] = trail_.back().old_value;
      trail_.pop_back();
    }
  }

  // Triple category contributions under (in, out) counts:
  //   locked  (in==2, out==1): contributes two_t to the exact value
  //   live    (can still reach exactly-two-in): two_t>0 adds to optimism
  //   dead    : nothing
  double locked_contrib(std::size_t t) const {
    return (triple_in_[t] == 2 && triple_out_[t] == 1) ? triples_[t].two_t : 0.0;
  }
  double live_contrib(std::size_t t) const {
    const int in = triple_in_[t], undecided = 3 - in - triple_out_[t];
    const bool live =
        in <= 2 && in + undecided >= 2 && !(in == 2 && triple_out_[t] == 1);
    return (live && triples_[t].two_t > 0.0) ? triples_[t].two_t : 0.0;
  }

  void touch_triples(int slot, bool decided_in) {
    for (int ti : agent_triples_[slot]) {
      const auto t = static_cast<std::size_t>(ti);
      const double old_locked = locked_contrib(t);
      const double old_live = live_contrib(t);
      if (decided_in)
        ++triple_in_[t];
      else
        ++triple_out_[t];
      counter_trail_.push_back({ti, decided_in});
      const double new_locked = locked_contrib(t);
      const double new_live = live_contrib(t);
      if (new_locked != old_locked) set_double(value_, value_ + new_locked - old_locked);
      if (new_live != old_live) set_double(live_pos_, live_pos_ + new_live - old_live);
    }
  }

  void untouch_triples(std::size_t counter_mark) {
    while (counter_trail_.size() > counter_mark) {
      auto [ti, was_in] = counter_trail_.back();
      counter_trail_.pop_back();
      if (was_in)
        --triple_in_[static_cast<std::size_t>(ti)];
      else
        --triple_out_[static_cast<std::size_t>(ti)];
    }
  }

  void remove_from_free(int slot) {
    for (std::size_t i = 0; i < free_.size(); ++i) {
      if (free_[i] == slot) {
        free_[i] = free_.back();
        free_.pop_back();
        return;
      }
    }
  }

  void decide(int slot, bool in) {
    remove_from_free(slot);
    status_[slot] = in ? 1 : 2;
    if (in) {
      set_double(value_, value_ + lin_[slot] + s_[slot]);
      in_mask_ |= std::uint64_t{1} << slot;
      for (int j : free_) {
        const double q = quad_.at(slot, j);
        if (q != 0.0) set_double(s_[j], s_[j] + q);
        if (q > 0.0) set_double(m_[j], m_[j] - 0.5 * q);
      }
    } else {
      for (int j : free_) {
        const double q = quad_.at(slot, j);
        if (q > 0.0) set_double(m_[j], m_[j] - 0.5 * q);
      }
    }
    touch_triples(slot, in);
  }

  void undo(int slot, bool in, std::size_t trail_mark, std::size_t counter_mark) {
    untouch_triples(counter_mark);
    rewind(trail_mark);
    if (in) in_mask_ &= ~(std::uint64_t{1} << slot);
    status_[slot] = 0;
    free_.push_back(slot);
  }

  /// Permanent exclusion (dominance preprocessing); nothing to undo.
  void force_out(int slot) {
    remove_from_free(slot);
    status_[slot] = 2;
    for (int j : free_) {
      const double q = quad_.at(slot, j);
      if (q > 0.0) m_[j] -= 0.5 * q;
    }
    for (int ti : agent_triples_[slot]) {
      const auto t = static_cast<std::size_t>(ti);
      const double old_live = live_contrib(t);
      ++triple_out_[t];
      live_pos_ += live_contrib(t) - old_live;
    }
  }

  double upper_bound() const {
    double ub = value_ + live_pos_;
    for (int j : free_) ub += std::max(0.0, lin_[j] + s_[j] + m_[j]);
    return ub;
  }

  double threshold() const {
    return static_cast<int>(pool_.size()) < top_k_
               ? -std::numeric_limits<double>::infinity()
               : pool_.back().value;
  }

  bool worth_exploring(double ub) const {
    const double thr = threshold();
    if (ub > thr) return true;
    if (top_k_ > 1) return false;  // ties beyond rank 1 are not tracked
    // Equal bound: a lexicographically smaller tie may still hide below
    // this node, but only if the partial inclusion mask precedes the
    // incumbent (every completion extends in_mask_ upwards).
    return ub == thr && !pool_.empty() &&
           lex_less(to_agent_mask(in_mask_), pool_.front().agent_mask);
  }

  void offer(std::uint64_t slots) {
    if (slots == 0) return;
    const Coalition agent_mask = to_agent_mask(slots);
    if (forbidden_.count(agent_mask.bits)) return;
    const double v = evaluate(slots);
    Entry e{v, slots, agent_mask};
    auto better = [](const Entry& x, const Entry& y) {
      if (x.value != y.value) return x.value > y.value;
      return lex_less(x.agent_mask, y.agent_mask);
    };
    for (const Entry& have : pool_)
      if (have.slots == slots) return;
    pool_.push_back(e);
    std::sort(pool_.begin(), pool_.end(), better);
    if (static_cast<int>(pool_.size()) > top_k_) pool_.pop_back();
  }

  void dfs() {
    ++nodes_;
    if (!worth_exploring(upper_bound())) return;
    if (free_.empty()) {
      offer(in_mask_);
      return;
    }
    // Branch on the most attractive undecided agent, inclusion first, so a
    // greedy dive seeds a strong incumbent.
    int pick = free_[0];
    double best_r = -std::numeric_limits<double>::infinity();
    for (int j : free_) {
      const double r = lin_[j] + s_[j] + m_[j];
      if (r > best_r || (r == best_r && j < pick)) {
        best_r = r;
        pick = j;
      }
    }
    for (const bool in : {true, false}) {
      const std::size_t tm = mark();
      const std::size_t cm = counter_trail_.size();
      decide(pick, in);
      dfs();
      undo(pick, in, tm, cm);
    }
  }

  std::vector<int> agents_;
  std::vector<double> lin_;
  SquareMatrix quad_;
  std::vector<Triple> triples_;
  std::vector<Coalition> forbidden_list_;
  std::unordered_set<std::uint64_t> forbidden_;
  std::vector<std::vector<int>> agent_triples_;

  // search state
  std::vector<int> status_;
  std::vector<int> free_;
  std::vector<double> s_, m_;
  double value_ = 0.0, live_pos_ = 0.0;
  std::uint64_t in_mask_ = 0;
  std::vector<TrailEntry> trail_;
  std::vector<std::pair<int, bool>> counter_trail_;
  std::vector<int> triple_in_, triple_out_;
  std::vector<Entry> pool_;
  int top_k_ = 1;
  long nodes_ = 0;
};

inline void check_problem(const Instance& inst, const PricingProblem& p) {
  if (static_cast<int>(p.duals.size()) != inst.n())
    throw std::invalid_argument("pricing: dual vector size != n");
  if (p.free.intersects(p.covered))
    throw std::invalid_argument("pricing: free and covered agents overlap");
  for (Coalition f : p.forbidden)
    if (!f.subset_of(p.free))
      throw std::invalid_argument("pricing: forbidden coalition outside free set");
}

inline QkpfEngine build_engine(const Instance& inst, const PricingProblem& p) {
  check_problem(inst, p);
  const std::vector<int> agents = p.free.members();
  const int k = static_cast<int>(agents.size());
  std::vector<double> lin(static_cast<std::size_t>(k), 0.0);
  SquareMatrix quad(k);
  std::vector<QkpfEngine::Triple> triples;

  switch (inst.kind()) {
    case ValuationKind::edge_sum:
      for (int a = 0; a < k; ++a) {
        lin[a] = p.duals[agents[a]];
        for (int b = a + 1; b < k; ++b)
          quad.set_sym(a, b, inst.weight(agents[a], agents[b]));
      }
      break;
    case ValuationKind::correlation:
      for (int a = 0; a < k; ++a) {
        // The w- row sum ranges over all of V, not just the free agents.
        lin[a] = p.duals[agents[a]] + 0.5 * inst.minus_adjacency(agents[a]).size();
        for (int b = a + 1; b < k; ++b) {
          double q = 0.0;
          if (inst.plus_adjacency(agents[a]).contains(agents[b])) q = 1.0;
          if (inst.minus_adjacency(agents[a]).contains(agents[b])) q = -1.0;
          quad.set_sym(a, b, q);
        }
      }
      break;
    case ValuationKind::coordination: {
      for (int a = 0; a < k; ++a) lin[a] = p.duals[agents[a]];
      // Pairwise coefficient: triangles closed by an already covered agent
      // are a constant quadratic bonus at this node.
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
          const double wab = inst.weight(agents[a], agents[b]);
          if (wab == 0.0) continue;
          double cross = 0.0;
          p.covered.for_each([&](int u) {
            cross += inst.weight(agents[a], u) * inst.weight(agents[b], u);
          });
          quad.set_sym(a, b, 2.0 * wab * cross);
        }
      }
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
          const double wab = inst.weight(agents[a], agents[b]);
          if (wab == 0.0) continue;
          for (int c = b + 1; c < k; ++c) {
            const double t =
                wab * inst.weight(agents[a], agents[c]) * inst.weight(agents[b], agents[c]);
            if (t != 0.0) triples.push_back({a, b, c, 2.0 * t});
          }
        }
      }
      break;
    }
  }
  return QkpfEngine(agents, std::move(lin), std::move(quad), std::move(triples),
                    p.forbidden);
}

inline PricingResult finish(const Instance& inst, PricingResult res) {
  for (PricedColumn& cand : res.candidates)
    cand.value = coalition_value(inst, cand.coalition);
  return res;
}

}  // namespace detail

inline PricingResult price_edge_sum(const Instance& inst, const PricingProblem& p) {
  if (inst.kind() != ValuationKind::edge_sum)
    throw std::invalid_argument("price_edge_sum: wrong valuation kind");
  return detail::finish(inst, detail::build_engine(inst, p).search(p.top_k));
}

inline PricingResult price_correlation(const Instance& inst, const PricingProblem& p) {
  if (inst.kind() != ValuationKind::correlation)
    throw std::invalid_argument("price_correlation: wrong valuation kind");
  return detail::finish(inst, detail::build_engine(inst, p).search(p.top_k));
}

inline PricingResult price_coordination(const Instance& inst, const PricingProblem& p) {
  if (inst.kind() != ValuationKind::coordination)
    throw std::invalid_argument("price_coordination: wrong valuation kind");
  return detail::finish(inst, detail::build_engine(inst, p).search(p.top_k));
}

inline PricingResult price(const Instance& inst, const PricingProblem& p) {
  switch (inst.kind()) {
    case ValuationKind::edge_sum: return price_edge_sum(inst, p);
    case ValuationKind::correlation: return price_correlation(inst, p);
    case ValuationKind::coordination: return price_coordination(inst, p);
  }
  throw std::logic_error("unreachable");
}

/// Exhaustive reference pricer: scans all 2^|U'| subsets through the same
/// evaluation function as the exact engine.
inline PricingResult price_bruteforce(const Instance& inst, const PricingProblem& p) {
  if (p.free.size() > 25)
    throw std::invalid_argument("price_bruteforce: more than 25 free agents");
  detail::QkpfEngine engine = detail::build_engine(inst, p);
  std::unordered_set<std::uint64_t> forbidden;
  for (Coalition f : p.forbidden) forbidden.insert(f.bits);

  PricingResult res;
  const int k = p.free.size();
  Coalition best_mask;
  for (std::uint64_t slots = 1; slots < (std::uint64_t{1} << k); ++slots) {
    ++res.nodes_explored;
    const Coalition c = engine.to_agent_mask(slots);
    if (forbidden.count(c.bits)) continue;
    const double v = engine.evaluate(slots);
    if (!res.found || v > res.objective ||
        (v == res.objective && lex_less(c, best_mask))) {
      res.found = true;
      res.objective = v;
      best_mask = c;
    }
  }
  if (res.found) {
    res.coalition = best_mask;
    res.candidates.push_back({best_mask, coalition_value(inst, best_mask), res.objective});
  }
  return res;
}

/// Feasibility (Farkas) pricer: maximizes the phase-1 prices over
/// non-forbidden coalitions of the free agents; a positive optimum names a
/// column that reduces the restricted model's infeasibility.
inline Pricer make_farkas_pricer(const Instance& inst, const MasterModel& model,
                                 std::vector<Coalition> extra_forbidden) {
  return [&inst, &model,
          extra = std::move(extra_forbidden)](const std::vector<double>& prices) {
    const std::vector<int> agents = model.free_set().members();
    std::vector<double> lin(agents.size());
    for (std::size_t s = 0; s < agents.size(); ++s) lin[s] = prices[agents[s]];
    std::vector<Coalition> forbidden;
    forbidden.reserve(model.columns().size() + extra.size());
    for (const Column& col : model.columns()) forbidden.push_back(col.coalition);
    for (Coalition c : extra) forbidden.push_back(c);
    detail::QkpfEngine engine(agents, std::move(lin),
                              SquareMatrix(static_cast<int>(agents.size())), {},
                              forbidden);
    PricingResult res = detail::finish(inst, engine.search(1));
    return res.candidates;
  };
}

/// Adapter for MasterModel::generate_columns: prices against the model's
/// current columns plus the node's extra forbidden coalitions.
inline Pricer make_pricer(const Instance& inst, const MasterModel& model,
                          Coalition covered, std::vector<Coalition> extra_forbidden,
                          int top_k = 1) {
  return [&inst, &model, covered, extra = std::move(extra_forbidden),
          top_k](const std::vector<double>& duals) {
    PricingProblem p;
    p.free = model.free_set();
    p.covered = covered;
    p.duals = duals;
    p.forbidden.reserve(model.columns().size() + extra.size());
    for (const Column& col : model.columns()) p.forbidden.push_back(col.coalition);
    for (Coalition c : extra) p.forbidden.push_back(c);
    p.top_k = top_k;
    PricingResult res = price(inst, p);
    return res.candidates;
  };
}

}  // namespace csg

#endif  // CSG_PRICING_HPP
