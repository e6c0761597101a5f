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

#ifndef CSG_LINEARIZE_HPP
#define CSG_LINEARIZE_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/pricing.hpp"
#include "csg/util.hpp"

namespace csg {

/// Glover linearization of a pricing sub-problem. Quadratic kinds carry
/// one continuous u_i per free agent and four linear constraint rows; the
/// coordination model carries z_i with the same four rows, which stay
/// quadratic in v (degree reduction, not full linearization).
///
/// Per agent i (writing e_i(v) for the bounded row expression):
///   (a)  e_i(v) + hi_i v_i - u_i <= hi_i
///   (b)  e_i(v) + lo_i v_i - u_i >= lo_i
///   (c)  lo_i v_i - u_i <= 0
///   (d)  hi_i v_i - u_i >= 0
struct LinearizedModel {
  ValuationKind kind{};
  const Instance* inst = nullptr;
  Coalition free_set;  // U'
  Coalition covered;   // U
  std::vector<int> agents;
  std::vector<double> lin;     // objective coefficient on v_i
  double u_obj_coeff = 1.0;    // 1, except 1/2 for the edge-sum model (see below)
  bool cubic = false;          // coordination: z_i, quadratic rows
  SquareMatrix row_w;          // slot-indexed row weights (w or w')
  std::vector<double> lo, hi;  // W-/W+ (resp. Y-/Y+)
  std::vector<Coalition> forbidden;

  int slot_of(int agent) const {
    for (std::size_t s = 0; s < agents.size(); ++s)
      if (agents[s] == agent) return static_cast<int>(s);
    return -1;
  }

  /// Inner expression of the coordination rows:
  ///   E_i(v) = sum_{j in U'} v_j ( sum_{k in U'} t_ijk (1 - v_k)
  ///                              + sum_{k in U}  t_ijk )
  /// with t_ijk = w_ij w_ik w_jk.
  double cubic_row_expr(int slot, Coalition v) const {
    const int i = agents[slot];
    double e = 0.0;
    for (int j : agents) {
      if (j == i || !v.contains(j)) continue;
      const double wij = inst->weight(i, j);
      if (wij == 0.0) continue;
      double inner = 0.0;
      for (int k : agents)
        if (!v.contains(k)) inner += inst->weight(i, k) * inst->weight(j, k);
      covered.for_each([&](int k) { inner += inst->weight(i, k) * inst->weight(j, k); });
      e += wij * inner;
    }
    return e;
  }

  double row_expr(int slot, Coalition v) const {
    if (cubic) return cubic_row_expr(slot, v);
    double e = 0.0;
    for (std::size_t j = 0; j < agents.size(); ++j)
      if (v.contains(agents[j])) e += row_w.at(slot, static_cast<int>(j));
    return e;
  }
};

namespace detail {

inline LinearizedModel make_base(const Instance& inst, const PricingProblem& p) {
  check_problem(inst, p);
  LinearizedModel m;
  m.kind = inst.kind();
  m.inst = &inst;
  m.free_set = p.free;
  m.covered = p.covered;
  m.agents = p.free.members();
  m.forbidden = p.forbidden;
  return m;
}

}  // namespace detail

/// Edge-sum QKPf model: constraints in the raw weights w with their
/// negative/positive row-sum bounds. At any binary point the pinned u_i
/// equals the full w-row sum, so sum u_i double-counts every inside edge;
/// the 1/2 objective coefficient restores v(C).
inline LinearizedModel linearize_edge_sum(const Instance& inst,
                                          const PricingProblem& p) {
  if (inst.kind() != ValuationKind::edge_sum)
    throw std::invalid_argument("linearize_edge_sum: wrong valuation kind");
  LinearizedModel m = detail::make_base(inst, p);
  const int k = static_cast<int>(m.agents.size());
  m.u_obj_coeff = 0.5;
  m.lin.resize(k);
  m.row_w = SquareMatrix(k);
  for (int a = 0; a < k; ++a) {
    m.lin[a] = p.duals[m.agents[a]];
    for (int b = 0; b < k; ++b)
      if (b != a) m.row_w.at(a, b) = inst.weight(m.agents[a], m.agents[b]);
  }
  std::vector<int> slots(m.agents.size());
  for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = static_cast<int>(s);
  std::tie(m.lo, m.hi) = glover_bounds(m.row_w, slots);
  return m;
}

/// Correlation model as printed: w'_ij = (w+_ij - w-_ij)/2 row weights,
/// p_i = (sum_j w-_ij)/2 + pi_i objective coefficients. The w- row sum
/// ranges over all of V.
inline LinearizedModel linearize_correlation(const Instance& inst,
                                             const PricingProblem& p) {
  if (inst.kind() != ValuationKind::correlation)
    throw std::invalid_argument("linearize_correlation: wrong valuation kind");
  LinearizedModel m = detail::make_base(inst, p);
  const int k = static_cast<int>(m.agents.size());
  m.lin.resize(k);
  m.row_w = SquareMatrix(k);
  for (int a = 0; a < k; ++a) {
    m.lin[a] = 0.5 * inst.minus_adjacency(m.agents[a]).size() + p.duals[m.agents[a]];
    for (int b = 0; b < k; ++b) {
      if (b == a) continue;
      double w = 0.0;
      if (inst.plus_adjacency(m.agents[a]).contains(m.agents[b])) w = 0.5;
      if (inst.minus_adjacency(m.agents[a]).contains(m.agents[b])) w = -0.5;
      m.row_w.at(a, b) = w;
    }
  }
  std::vector<int> slots(m.agents.size());
  for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = static_cast<int>(s);
  std::tie(m.lo, m.hi) = glover_bounds(m.row_w, slots);
  return m;
}

/// Degree reduction of the cubic coordination objective: one z_i per free
/// agent, four Y-bounded rows that stay quadratic in v. Unit-weight
/// instances use the stated shortcuts (Y+ = n^2 at the root, |U'|^2/2 +
/// |U'||U| at a node); otherwise the general half-sums.
inline LinearizedModel reduce_coordination(const Instance& inst,
                                           const PricingProblem& p) {
  if (inst.kind() != ValuationKind::coordination)
    throw std::invalid_argument("reduce_coordination: wrong valuation kind");
  LinearizedModel m = detail::make_base(inst, p);
  m.cubic = true;
  const int k = static_cast<int>(m.agents.size());
  m.lin.resize(k);
  for (int a = 0; a < k; ++a) m.lin[a] = p.duals[m.agents[a]];
  m.lo.assign(k, 0.0);
  m.hi.assign(k, 0.0);
  const bool at_root = p.covered.empty() && p.free == Coalition::full(inst.n());
  if (inst.unit_weights()) {
    const double nu = static_cast<double>(m.agents.size());
    const double nc = static_cast<double>(p.covered.size());
    const double y_plus =
        at_root ? static_cast<double>(inst.n()) * inst.n() : nu * nu / 2.0 + nu * nc;
    for (int a = 0; a < k; ++a) m.hi[a] = y_plus;
    return m;
  }
  for (int a = 0; a < k; ++a) {
    const int i = m.agents[a];
    double lo = 0.0, hi = 0.0;
    for (int j : m.agents) {
      if (j == i) continue;
      const double wij = inst.weight(i, j);
      if (wij == 0.0) continue;
      for (int kk : m.agents) {
        const double t = wij * inst.weight(i, kk) * inst.weight(j, kk);
        if (t < 0.0) lo += 0.5 * t;
        if (t > 0.0) hi += 0.5 * t;
      }
      p.covered.for_each([&](int kk) {
        const double t = wij * inst.weight(i, kk) * inst.weight(j, kk);
        if (t < 0.0) lo += t;
        if (t > 0.0) hi += t;
      });
    }
    m.lo[a] = lo;
    m.hi[a] = hi;
  }
  return m;
}

inline LinearizedModel linearize(const Instance& inst, const PricingProblem& p) {
  switch (inst.kind()) {
    case ValuationKind::edge_sum: return linearize_edge_sum(inst, p);
    case ValuationKind::correlation: return linearize_correlation(inst, p);
    case ValuationKind::coordination: return reduce_coordination(inst, p);
  }
  throw std::logic_error("unreachable");
}

/// Objective value of the model at a binary point: pins each u_i (z_i) to
/// its tight value from the four constraint families and checks them all.
/// Violated forbidden rows reject the point; an impossible u interval means
/// the bounds are wrong and raises an error.
inline double evaluate_linearized(const LinearizedModel& m, Coalition v) {
  if (!v.subset_of(m.free_set))
    throw std::invalid_argument("evaluate_linearized: point outside free agents");
  // Each forbidden row is the no-good cut requiring Hamming distance >= 1
  // from chi_F, so exactly the point v = chi_F violates it.
  for (Coalition f : m.forbidden)
    if (v == f)
      throw std::invalid_argument("evaluate_linearized: point violates forbidden row");

  const double tol = 1e-9;
  double obj = 0.0;
  for (std::size_t s = 0; s < m.agents.size(); ++s) {
    const int slot = static_cast<int>(s);
    const bool inside = v.contains(m.agents[s]);
    const double e = m.row_expr(slot, v);
    const double u = inside ? e : 0.0;
    const double vi = inside ? 1.0 : 0.0;
    const bool ok = e + m.hi[s] * vi - u <= m.hi[s] + tol &&
                    e + m.lo[s] * vi - u >= m.lo[s] - tol &&
                    m.lo[s] * vi - u <= tol && m.hi[s] * vi - u >= -tol;
    if (!ok)
      throw Error("linearize: inconsistent Glover bounds at agent " +
                  std::to_string(m.agents[s] + 1));
    obj += m.lin[s] * vi + m.u_obj_coeff * u;
  }
  return obj;
}

// ---------------------------------------------------------------------------
// LP-format export. Deterministic naming: binaries v<agent>, continuous
// u<agent> (quadratic) or z<agent> (cubic), forbidden rows f1.., Glover rows
// g1.. (four per agent, (a)-(d) order). Quadratic constraint terms use the
// bracketed syntax.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void append_term(std::string& row, double coeff, const std::string& var) {
  if (coeff == 0.0) return;
  if (coeff < 0.0)
    row += " - ";
  else
    row += row.empty() ? "" : " + ";
  const double a = std::fabs(coeff);
  if (a != 1.0) {
    row += num(a);
    row += " ";
  }
  row += var;
}

}  // namespace detail

struct ExportOptions {
  bool second_stage = false;  // cubic only: linearize the z_i rows via z_ij
};

inline void export_lp(const LinearizedModel& m, std::ostream& out,
                      ExportOptions opts = {}) {
  using detail::append_term;
  using detail::num;
  const auto& agents = m.agents;
  const int k = static_cast<int>(agents.size());
  const char uvar = m.cubic ? 'z' : 'u';
  auto vn = [&](int agent) { return "v" + std::to_string(agent + 1); };
  auto un = [&](int agent) { return uvar + std::to_string(agent + 1); };
  auto zzn = [&](int i, int j) {
    return "z" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  };
  if (opts.second_stage && !m.cubic)
    throw std::invalid_argument("export_lp: second stage applies to coordination only");

  out << "\\ " << m.inst->name() << " pricing model (" << to_string(m.kind) << ")\n";
  out << "Maximize\n obj:";
  {
    std::string row;
    for (int s = 0; s < k; ++s) append_term(row, m.lin[s], vn(agents[s]));
    for (int s = 0; s < k; ++s) append_term(row, m.u_obj_coeff, un(agents[s]));
    out << (row.empty() ? " 0 v" + std::to_string(agents.empty() ? 1 : agents[0] + 1)
                        : " " + row)
        << "\n";
  }
  out << "Subject To\n";

  // No-good rows: sum_{i not in F} v_i + sum_{i in F} (1 - v_i) >= 1 cuts
  // exactly the characteristic vector of the forbidden coalition F.
  int fid = 0;
  for (Coalition f : m.forbidden) {
    std::string row;
    for (int agent : agents)
      append_term(row, f.contains(agent) ? -1.0 : 1.0, vn(agent));
    out << " f" << ++fid << ": " << row << " >= " << (1 - f.size()) << "\n";
  }

  // t_ijk over free agents, needed by the cubic rows.
  auto cubic_linear_coeff = [&](int i, int j) {
    double c = 0.0;
    const double wij = m.inst->weight(i, j);
    if (wij == 0.0) return 0.0;
    for (int kk : agents) c += wij * m.inst->weight(i, kk) * m.inst->weight(j, kk);
    m.covered.for_each(
        [&](int kk) { c += wij * m.inst->weight(i, kk) * m.inst->weight(j, kk); });
    return c;
  };

  int gid = 0;
  auto emit_four = [&](int s, const std::string& expr_linear,
                       const std::string& expr_quad) {
    const int agent = agents[s];
    const std::string u = un(agent);
    auto emit = [&](double bound, const char* rel, double rhs, bool with_expr) {
      std::string row = with_expr ? expr_linear : std::string{};
      append_term(row, bound, vn(agent));
      out << " g" << ++gid << ": " << row;
      if (with_expr && !expr_quad.empty()) out << " + [ " << expr_quad << " ]";
      out << (row.empty() ? "- " : " - ") << u << " " << rel << " " << num(rhs)
          << "\n";
    };
    emit(m.hi[s], "<=", m.hi[s], true);   // e + hi v_i - u <= hi
    emit(m.lo[s], ">=", m.lo[s], true);   // e + lo v_i - u >= lo
    emit(m.lo[s], "<=", 0.0, false);      // lo v_i - u <= 0
    emit(m.hi[s], ">=", 0.0, false);      // hi v_i - u >= 0
  };

  std::vector<std::pair<int, int>> zpairs;  // second-stage variables
  if (!m.cubic) {
    for (int s = 0; s < k; ++s) {
      std::string row;
      for (int t = 0; t < k; ++t)
        if (t != s) append_term(row, m.row_w.at(s, t), vn(agents[t]));
      emit_four(s, row, "");
    }
  } else if (!opts.second_stage) {
    for (int s = 0; s < k; ++s) {
      const int i = agents[s];
      std::string lin_part, quad_part;
      for (int j : agents)
        if (j != i) append_term(lin_part, cubic_linear_coeff(i, j), vn(j));
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
          if (agents[a] == i || agents[b] == i) continue;
          const double t = m.inst->weight(i, agents[a]) *
                           m.inst->weight(i, agents[b]) *
                           m.inst->weight(agents[a], agents[b]);
          if (t != 0.0)
            append_term(quad_part, -2.0 * t, vn(agents[a]) + " * " + vn(agents[b]));
        }
      }
      emit_four(s, lin_part, quad_part);
    }
  } else {
    // Second stage: apply the transform once more to z_ij = v_j * E_ij(v),
    // turning the z_i rows linear at the price of n^2 variables and 4n^2
    // rows.
    for (int s = 0; s < k; ++s) {
      const int i = agents[s];
      std::string row;
      for (int j : agents)
        if (j != i) append_term(row, 1.0, zzn(i, j));
      emit_four(s, row, "");
    }
    int hid = 0;
    for (int s = 0; s < k; ++s) {
      const int i = agents[s];
      for (int j : agents) {
        if (j == i) continue;
        zpairs.emplace_back(i, j);
        const double wij = m.inst->weight(i, j);
        double xij = 0.0;  // constant part from covered agents
        m.covered.for_each(
            [&](int kk) { xij += wij * m.inst->weight(i, kk) * m.inst->weight(j, kk); });
        double neg = 0.0, pos = 0.0, total = 0.0;
        for (int kk : agents) {
          const double t = wij * m.inst->weight(i, kk) * m.inst->weight(j, kk);
          total += t;
          if (t < 0.0) neg += t;
          if (t > 0.0) pos += t;
        }
        const double lo = xij + neg, hi = xij + pos;
        // E_ij(v) = (total + xij) - sum_k t_ijk v_k
        std::string e;
        for (int kk : agents) {
          const double t = wij * m.inst->weight(i, kk) * m.inst->weight(j, kk);
          append_term(e, -t, vn(kk));
        }
        const double cst = total + xij;
        const std::string z = zzn(i, j);
        auto emit = [&](double bound, const char* rel, double rhs, bool with_expr) {
          std::string row = with_expr ? e : std::string{};
          append_term(row, bound, vn(j));
          out << " h" << ++hid << ": " << row << (row.empty() ? "- " : " - ") << z
              << " " << rel << " " << num(rhs) << "\n";
        };
        emit(hi, "<=", hi - cst, true);
        emit(lo, ">=", lo - cst, true);
        emit(lo, "<=", 0.0, false);
        emit(hi, ">=", 0.0, false);
      }
    }
  }

  out << "Bounds\n";
  for (int agent : agents) out << " " << un(agent) << " free\n";
  for (auto [i, j] : zpairs) out << " " << zzn(i, j) << " free\n";
  out << "Binaries\n";
  for (int agent : agents) out << " " << vn(agent);
  out << "\nEnd\n";
}

}  // namespace csg

#endif  // CSG_LINEARIZE_HPP
