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

#ifndef CSG_SIMPLEX_HPP
#define CSG_SIMPLEX_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "csg/util.hpp"

namespace csg {

/// Dense revised primal simplex for the restricted master problems:
///
///   max c'x   s.t.  A x = 1,  x >= 0
///
/// where every column of A is the 0/1 characteristic vector of a coalition
/// over the covering rows (held as a 64-bit mask). Row count stays <= 64;
/// column count grows into the low thousands, so an explicit basis inverse
/// with periodic refactorization is comfortable.
///
/// Entering rule is Dantzig (most positive reduced cost, smallest index on
/// ties). Set-partitioning LPs are highly degenerate, so after 50
/// consecutive degenerate pivots the solver switches to Bland's rule until
/// a non-degenerate pivot occurs.
class DenseSimplex {
 public:
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  struct Result {
    Status status = Status::optimal;
    double objective = 0.0;
    std::vector<double> x;  // per column
    std::vector<double> y;  // row duals, maximization convention
    long iterations = 0;
  };

  explicit DenseSimplex(int rows) : m_(rows) {}

  int rows() const { return m_; }
  int cols() const { return static_cast<int>(cols_.size()); }

  /// Adds a column with the given row-support mask; returns its index.
  int add_column(std::uint64_t row_mask, double cost) {
    cols_.push_back({row_mask, cost});
    return static_cast<int>(cols_.size()) - 1;
  }

  std::uint64_t column_mask(int j) const { return cols_[j].mask; }
  double column_cost(int j) const { return cols_[j].cost; }

  /// `warm_basis`: candidate basic column indices (one per row). When it
  /// does not factorize into a feasible basis the solver falls back to
  /// phase 1 with artificial columns.
  Result solve(const std::vector<int>& warm_basis = {}, long iter_limit = 500000) {
    Result res;
    if (m_ == 0) {  // degenerate model: nothing to cover
      res.x.assign(cols_.size(), 0.0);
      return res;
    }

    long iters = 0;
    bool have_basis = false;
    if (static_cast<int>(warm_basis.size()) == m_) {
      basis_ = warm_basis;
      if (factorize() && min_basic_value() >= -kFeasTol) have_basis = true;
    }
    if (!have_basis) {
      Status st = phase_one(iter_limit, iters);
      if (st != Status::optimal) {
        res.status = st;
        res.iterations = iters;
        if (st == Status::infeasible) {
          // Phase-1 duals certify the infeasibility (Farkas prices): a new
          // column j can reduce it only if y . a_j < 0.
          res.y = duals(basic_costs(phase1_costs()));
        }
        return res;
      }
    }

    // Phase 2 with confirmation: after the loop claims optimality, refresh
    // the factorization and re-check; resume if the refreshed reduced costs
    // disagree (guards against accumulated pivot error).
    bool confirmed = false;
    for (int round = 0; round < 4 && !confirmed; ++round) {
      Status st = iterate(real_costs(), iter_limit, iters, /*artificials=*/0);
      if (st != Status::optimal) {
        res.status = st;
        res.iterations = iters;
        return res;
      }
      factorize();
      compute_basic_values();
      confirmed = !improving_column(real_costs(), 0);
    }
    if (!confirmed) {
      res.status = Status::iteration_limit;
      res.iterations = iters;
      return res;
    }

    res.status = Status::optimal;
    res.iterations = iters;
    res.x.assign(cols_.size(), 0.0);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] >= 0 && basis_[r] < cols()) res.x[basis_[r]] = xb_[r];
    const std::vector<double> cb = basic_costs(real_costs());
    res.y = duals(cb);
    res.objective = 0.0;
    for (int r = 0; r < m_; ++r) res.objective += cb[r] * xb_[r];
    return res;
  }

  /// Basic column indices of the last solve (warm-start hand-off).
  const std::vector<int>& basis() const { return basis_; }

 private:
  struct Col {
    std::uint64_t mask;
    double cost;
  };

  static constexpr double kPivTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kFeasTol = 1e-7;
  static constexpr int kRefactorEvery = 64;
  static constexpr int kDegenerateLimit = 50;

  // Artificial columns live at virtual indices cols() .. cols()+m_-1; the
  // artificial for row r is the unit column e_r.
  bool is_artificial(int j) const { return j >= cols(); }
  std::uint64_t mask_of(int j) const {
    return is_artificial(j) ? (std::uint64_t{1} << (j - cols())) : cols_[j].mask;
  }

  // Artificials carry cost 0 outside phase 1: the phase-2 entering scan
  // never touches them, and one may legitimately stay basic at level zero
  // when the real columns are rank-deficient (its row dual is then pinned
  // to 0, which is dual-feasible at termination). The ratio test below
  // makes sure such an artificial is kicked out, never grown.
  std::vector<double> real_costs() const {
    std::vector<double> c(cols_.size() + m_, 0.0);
    for (std::size_t j = 0; j < cols_.size(); ++j) c[j] = cols_[j].cost;
    return c;
  }

  std::vector<double> phase1_costs() const {
    std::vector<double> c(cols_.size() + m_, 0.0);
    for (int r = 0; r < m_; ++r) c[cols_.size() + r] = -1.0;
    return c;
  }

  Status phase_one(long iter_limit, long& iters) {
    basis_.resize(m_);
    for (int r = 0; r < m_; ++r) basis_[r] = cols() + r;
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r) binv_[static_cast<std::size_t>(r) * m_ + r] = 1.0;
    xb_.assign(m_, 1.0);

    Status st = iterate(phase1_costs(), iter_limit, iters, m_);
    if (st != Status::optimal) return st;
    double infeas = 0.0;
    for (int r = 0; r < m_; ++r)
      if (is_artificial(basis_[r])) infeas += std::max(0.0, xb_[r]);
    if (infeas > kFeasTol) return Status::infeasible;

    // Drive leftover artificials (basic at zero) out of the basis where a
    // real column can replace them. When the real column set is
    // rank-deficient none can; the artificial then stays basic at zero
    // with cost 0 through phase 2.
    for (int r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (int j = 0; j < cols(); ++j) {
        if (in_basis(j)) continue;
        std::vector<double> u = ftran(mask_of(j));
        if (std::fabs(u[r]) > kPivTol) {
          pivot(j, r, u);
          break;
        }
      }
    }
    return Status::optimal;
  }

  Status iterate(const std::vector<double>& costs, long iter_limit, long& iters,
                 int artificial_count) {
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    const int total = cols() + (artificial_count > 0 ? m_ : 0);
    while (true) {
      if (iters >= iter_limit) return Status::iteration_limit;
      if (++since_refactor >= kRefactorEvery) {
        factorize();
        compute_basic_values();
        since_refactor = 0;
      }

      const std::vector<double> cb = basic_costs(costs);
      const std::vector<double> y = duals(cb);
      int enter = -1;
      double best = kCostTol;
      for (int j = 0; j < total; ++j) {
        if (in_basis(j)) continue;
        const double d = costs[j] - dot_rows(y, mask_of(j));
        if (bland) {
          if (d > kCostTol) {
            enter = j;
            break;
          }
        } else if (d > best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return Status::optimal;

      std::vector<double> u = ftran(mask_of(enter));
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      bool leave_kick = false;
      for (int r = 0; r < m_; ++r) {
        double ratio;
        bool kick = false;
        if (u[r] > kPivTol) {
          ratio = std::max(xb_[r], 0.0) / u[r];
        } else if (artificial_count == 0 && u[r] < -kPivTol &&
                   is_artificial(basis_[r]) && xb_[r] <= kFeasTol) {
          // A zero-level artificial would grow with this direction: force
          // it out at a degenerate pivot instead.
          ratio = 0.0;
          kick = true;
        } else {
          continue;
        }
        if (leave < 0 || ratio < theta - 1e-12) {
          theta = ratio;
          leave = r;
          leave_kick = kick;
        } else if (ratio < theta + 1e-12) {
          bool take = false;
          if (kick != leave_kick) {
            take = kick;
          } else {
            take = bland ? basis_[r] < basis_[leave]
                         : std::fabs(u[r]) > std::fabs(u[leave]);
          }
          if (take) {
            theta = ratio;
            leave = r;
            leave_kick = kick;
          }
        }
      }
      if (leave < 0) return Status::unbounded;

      pivot(enter, leave, u);
      ++iters;
      if (theta <= 1e-11) {
        if (++degenerate_run >= kDegenerateLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  bool improving_column(const std::vector<double>& costs, int artificial_count) const {
    const std::vector<double> cb = basic_costs(costs);
    const std::vector<double> y = duals(cb);
    const int total = cols() + (artificial_count > 0 ? m_ : 0);
    for (int j = 0; j < total; ++j) {
      if (in_basis(j)) continue;
      if (costs[j] - dot_rows(y, mask_of(j)) > 10 * kCostTol) return true;
    }
    return false;
  }

  bool in_basis(int j) const {
    for (int r = 0; r < m_; ++r)
      if (basis_[r] == j) return true;
    return false;
  }

  std::vector<double> basic_costs(const std::vector<double>& costs) const {
    std::vector<double> cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = costs[basis_[r]];
    return cb;
  }

  std::vector<double> duals(const std::vector<double>& cb) const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double c = cb[r];
      if (c == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(r) * m_];
      for (int cidx = 0; cidx < m_; ++cidx) y[cidx] += c * row[cidx];
    }
    return y;
  }

  double dot_rows(const std::vector<double>& y, std::uint64_t mask) const {
    double s = 0.0;
    for (std::uint64_t m = mask; m != 0; m &= m - 1) s += y[std::countr_zero(m)];
    return s;
  }

  std::vector<double> ftran(std::uint64_t mask) const {
    std::vector<double> u(m_, 0.0);
    for (std::uint64_t m = mask; m != 0; m &= m - 1) {
      const int c = std::countr_zero(m);
      for (int r = 0; r < m_; ++r) u[r] += binv_[static_cast<std::size_t>(r) * m_ + c];
    }
    return u;
  }

  void pivot(int enter, int leave, const std::vector<double>& u) {
    const double piv = u[leave];
    double* lrow = &binv_[static_cast<std::size_t>(leave) * m_];
    for (int c = 0; c < m_; ++c) lrow[c] /= piv;
    // Negative pivots only occur when forcing a zero-level artificial out;
    // the step length is zero then.
    const double theta = std::max(std::max(xb_[leave], 0.0) / piv, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      const double f = u[r];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(r) * m_];
      for (int c = 0; c < m_; ++c) row[c] -= f * lrow[c];
      xb_[r] -= theta * f;
    }
    xb_[leave] = theta;
    basis_[leave] = enter;
  }

  /// Rebuild the basis inverse by Gauss-Jordan with partial pivoting.
  bool factorize() {
    std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const std::uint64_t mask = mask_of(basis_[r]);
      for (std::uint64_t m = mask; m != 0; m &= m - 1)
        mat[static_cast<std::size_t>(std::countr_zero(m)) * m_ + r] = 1.0;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r) binv_[static_cast<std::size_t>(r) * m_ + r] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      for (int r = col + 1; r < m_; ++r)
        if (std::fabs(mat[static_cast<std::size_t>(r) * m_ + col]) >
            std::fabs(mat[static_cast<std::size_t>(piv) * m_ + col]))
          piv = r;
      if (std::fabs(mat[static_cast<std::size_t>(piv) * m_ + col]) < 1e-10) return false;
      if (piv != col) {
        for (int c = 0; c < m_; ++c) {
          std::swap(mat[static_cast<std::size_t>(piv) * m_ + c],
                    mat[static_cast<std::size_t>(col) * m_ + c]);
          std::swap(binv_[static_cast<std::size_t>(piv) * m_ + c],
                    binv_[static_cast<std::size_t>(col) * m_ + c]);
        }
      }
      const double d = mat[static_cast<std::size_t>(col) * m_ + col];
      for (int c = 0; c < m_; ++c) {
        mat[static_cast<std::size_t>(col) * m_ + c] /= d;
        binv_[static_cast<std::size_t>(col) * m_ + c] /= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = mat[static_cast<std::size_t>(r) * m_ + col];
        if (f == 0.0) continue;
        for (int c = 0; c < m_; ++c) {
          mat[static_cast<std::size_t>(r) * m_ + c] -=
              f * mat[static_cast<std::size_t>(col) * m_ + c];
          binv_[static_cast<std::size_t>(r) * m_ + c] -=
              f * binv_[static_cast<std::size_t>(col) * m_ + c];
        }
      }
    }
    compute_basic_values();
    return true;
  }

  void compute_basic_values() {
    xb_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) xb_[r] += binv_[static_cast<std::size_t>(r) * m_ + c];
  }

  double min_basic_value() const {
    double v = 0.0;
    for (double x : xb_) v = std::min(v, x);
    return v;
  }

  int m_;
  std::vector<Col> cols_;
  std::vector<int> basis_;
  std::vector<double> binv_;
  std::vector<double> xb_;
};

}  // namespace csg

#endif  // CSG_SIMPLEX_HPP
