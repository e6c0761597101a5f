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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csg/linearize.hpp"
#include "csg/pricing.hpp"
#include "test_support.hpp"

using namespace csg;

namespace {

PricingProblem root_problem(int n) {
  PricingProblem p;
  p.free = Coalition::full(n);
  p.duals.assign(static_cast<std::size_t>(n), 0.0);
  return p;
}

/// Tiny structural reader for the LP export: counts binaries, free
/// continuous variables, constraint rows and bracketed quadratic terms.
struct LpFileShape {
  int binaries = 0;
  int continuous = 0;
  int rows = 0;
  int quad_rows = 0;
  bool quad_in_objective = false;
};

LpFileShape read_lp_shape(const std::string& text) {
  LpFileShape shape;
  std::istringstream in(text);
  std::string line;
  enum { none, obj, rows, bounds, bins } section = none;
  while (std::getline(in, line)) {
    if (line.rfind("\\", 0) == 0) continue;
    if (line == "Maximize") { section = obj; continue; }
    if (line == "Subject To") { section = rows; continue; }
    if (line == "Bounds") { section = bounds; continue; }
    if (line == "Binaries") { section = bins; continue; }
    if (line == "End") break;
    switch (section) {
      case obj:
        if (line.find('[') != std::string::npos) shape.quad_in_objective = true;
        break;
      case rows:
        if (line.find(':') != std::string::npos) ++shape.rows;
        if (line.find('[') != std::string::npos) ++shape.quad_rows;
        break;
      case bounds:
        if (line.find("free") != std::string::npos) ++shape.continuous;
        break;
      case bins: {
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) ++shape.binaries;
        break;
      }
      default: break;
    }
  }
  return shape;
}

double direct_objective(const Instance& inst, const PricingProblem& p, Coalition v) {
  return reduced_cost(v, coalition_value(inst, v), p.duals);
}

}  // namespace

TEST_CASE("edge-sum model structure on T3") {
  Instance t3 = testing::t3();
  LinearizedModel m = linearize_edge_sum(t3, root_problem(3));
  REQUIRE(m.agents.size() == 3);
  REQUIRE(m.lo.size() == 3);
  REQUIRE(m.u_obj_coeff == 0.5);
  REQUIRE(m.lo[0] == -2.0);
  REQUIRE(m.hi[0] == 1.0);
  REQUIRE(evaluate_linearized(m, Coalition{0b110}) == Catch::Approx(3.0));
  REQUIRE(evaluate_linearized(m, Coalition{}) == 0.0);
}

TEST_CASE("zero-weight graph degenerates to the linear objective") {
  Instance zero(4, ValuationKind::edge_sum, {}, "zero");
  PricingProblem p = root_problem(4);
  p.duals = {0.25, -1.0, 2.0, 0.5};
  LinearizedModel m = linearize_edge_sum(zero, p);
  for (int s = 0; s < 4; ++s) {
    REQUIRE(m.lo[s] == 0.0);
    REQUIRE(m.hi[s] == 0.0);
  }
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    double expect = 0.0;
    for (int i = 0; i < 4; ++i)
      if ((bits >> i) & 1u) expect += p.duals[i];
    REQUIRE(evaluate_linearized(m, Coalition{bits}) == Catch::Approx(expect));
  }
}

TEST_CASE("correlation model coefficients on S3") {
  Instance s3 = testing::s3();
  LinearizedModel m = linearize_correlation(s3, root_problem(3));
  REQUIRE(m.lin == std::vector<double>{0.5, 0.0, 0.5});  // p_i
  REQUIRE(m.row_w.at(0, 1) == 0.5);
  REQUIRE(m.row_w.at(0, 2) == -0.5);
  REQUIRE(m.row_w.at(1, 2) == 0.5);
  REQUIRE(evaluate_linearized(m, Coalition{0b111}) == 2.0);
  REQUIRE(evaluate_linearized(m, Coalition{0b011}) == 1.5);
}

TEST_CASE("all-plus correlation collapses to a unit edge sum") {
  // With w- == 0 the linear coefficients are bare duals and the w' table is
  // the half-weight table of the unit edge-sum model, so the two models
  // evaluate identically (both to #edges-inside + duals).
  std::vector<Edge> signed_edges, weighted_edges;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      signed_edges.push_back({i, j, 0.0, Sign::plus});
      weighted_edges.push_back({i, j, 1.0, Sign::none});
    }
  Instance corr(5, ValuationKind::correlation, signed_edges, "plus");
  Instance unit(5, ValuationKind::edge_sum, weighted_edges, "unit");
  PricingProblem p = root_problem(5);
  std::mt19937_64 rng(12);
  for (double& d : p.duals) d = (static_cast<double>(rng() % 33) - 16.0) / 8.0;
  LinearizedModel mc = linearize_correlation(corr, p);
  LinearizedModel me = linearize_edge_sum(unit, p);
  for (int s = 0; s < 5; ++s) {
    REQUIRE(mc.lin[s] == p.duals[s]);  // no minus edges
    for (int t = 0; t < 5; ++t)
      REQUIRE(mc.row_w.at(s, t) == 0.5 * me.row_w.at(s, t));
  }
  for (std::uint64_t bits = 0; bits < 32; ++bits)
    REQUIRE(evaluate_linearized(mc, Coalition{bits}) ==
            evaluate_linearized(me, Coalition{bits}));
}

TEST_CASE("coordination Y bounds: shortcuts and node formula") {
  Instance k3 = testing::k3_unit();
  LinearizedModel root = reduce_coordination(k3, root_problem(3));
  REQUIRE(root.lo == std::vector<double>{0.0, 0.0, 0.0});
  REQUIRE(root.hi == std::vector<double>{9.0, 9.0, 9.0});
  REQUIRE(evaluate_linearized(root, Coalition{0b011}) == 2.0);
  REQUIRE(evaluate_linearized(root, Coalition{0b111}) == 0.0);

  PricingProblem node = root_problem(3);
  node.free = Coalition{0b011};
  node.covered = Coalition{0b100};
  LinearizedModel nm = reduce_coordination(k3, node);
  REQUIRE(nm.hi == std::vector<double>{4.0, 4.0});  // 2^2/2 + 2*1
  REQUIRE(evaluate_linearized(nm, Coalition{0b011}) == 2.0);
}

TEST_CASE("Glover equivalence on random points, all kinds") {
  std::mt19937_64 rng(20260810);
  for (int round = 0; round < 60; ++round) {
    const int n = 4 + static_cast<int>(rng() % 7);
    PricingProblem p = root_problem(n);
    for (double& d : p.duals) d = (static_cast<double>(rng() % 97) / 16.0) - 3.0;

    Instance es = generate_gilbert(testing::quick_spec(n, 0.7, rng()),
                                   ValuationKind::edge_sum);
    LinearizedModel me = linearize_edge_sum(es, p);
    Instance co = generate_gilbert(testing::quick_spec(n, 0.6, rng(), 0.6),
                                   ValuationKind::correlation);
    LinearizedModel mc = linearize_correlation(co, p);
    GenSpec gx = testing::quick_spec(n, 0.7, rng());
    if (round % 2) gx.weights = WeightMode::unit;
    Instance cx = generate_gilbert(gx, ValuationKind::coordination);
    LinearizedModel mx = reduce_coordination(cx, p);

    for (int trial = 0; trial < 8; ++trial) {
      Coalition v{rng() & Coalition::full(n).bits};
      REQUIRE(evaluate_linearized(me, v) ==
              Catch::Approx(direct_objective(es, p, v)).margin(1e-9));
      REQUIRE(evaluate_linearized(mc, v) == direct_objective(co, p, v));  // exact
      REQUIRE(evaluate_linearized(mx, v) ==
              Catch::Approx(direct_objective(cx, p, v)).margin(1e-9));
    }
  }
}

TEST_CASE("bound validity: every binary point stays inside [lo, hi]") {
  std::mt19937_64 rng(55);
  for (int round = 0; round < 20; ++round) {
    const int n = 4 + static_cast<int>(rng() % 5);  // up to 8
    PricingProblem p = root_problem(n);
    Instance inst = generate_gilbert(testing::quick_spec(n, 0.8, rng()),
                                     ValuationKind::edge_sum);
    LinearizedModel m = linearize_edge_sum(inst, p);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      for (std::size_t s = 0; s < m.agents.size(); ++s) {
        const double e = m.row_expr(static_cast<int>(s), Coalition{bits});
        REQUIRE(e >= m.lo[s] - 1e-12);
        REQUIRE(e <= m.hi[s] + 1e-12);
      }
    }
  }
}

TEST_CASE("Y bound validity for the cubic inner expression") {
  std::mt19937_64 rng(56);
  for (int round = 0; round < 12; ++round) {
    const int n = 4 + static_cast<int>(rng() % 4);  // up to 7
    GenSpec g = testing::quick_spec(n, 0.8, rng());
    if (round % 2 == 0) g.weights = WeightMode::unit;
    Instance inst = generate_gilbert(g, ValuationKind::coordination);

    PricingProblem p = root_problem(n);
    if (round % 3 == 0) {  // node shape: one covered agent
      p.covered = Coalition::singleton(n - 1);
      p.free = Coalition{Coalition::full(n).bits & ~p.covered.bits};
      p.duals.assign(static_cast<std::size_t>(n), 0.0);
    }
    LinearizedModel m = reduce_coordination(inst, p);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      Coalition v{bits & m.free_set.bits};
      for (std::size_t s = 0; s < m.agents.size(); ++s) {
        const double e = m.row_expr(static_cast<int>(s), v);
        REQUIRE(e >= m.lo[s] - 1e-12);
        REQUIRE(e <= m.hi[s] + 1e-12);
      }
    }
  }
}

TEST_CASE("optimum of the linearized model equals the pricing optimum") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 20; ++round) {
    const int n = 4 + static_cast<int>(rng() % 6);
    PricingProblem p = root_problem(n);
    for (double& d : p.duals) d = (static_cast<double>(rng() % 49) / 8.0) - 3.0;
    std::uint64_t f = rng() & Coalition::full(n).bits;
    if (f != 0) p.forbidden.push_back(Coalition{f});

    for (ValuationKind kind : {ValuationKind::edge_sum, ValuationKind::correlation,
                               ValuationKind::coordination}) {
      GenSpec g = testing::quick_spec(n, 0.7, rng(), 0.5);
      if (kind == ValuationKind::coordination) g.weights = WeightMode::unit;
      Instance inst = generate_gilbert(g, kind);
      LinearizedModel m = linearize(inst, p);
      double best = -1e300;
      for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
        if (f != 0 && bits == f) continue;
        best = std::max(best, evaluate_linearized(m, Coalition{bits}));
      }
      PricingResult r = price(inst, p);
      REQUIRE(r.found);
      REQUIRE(best == Catch::Approx(r.objective).margin(1e-9));
    }
  }
}

TEST_CASE("evaluate_linearized rejects forbidden points and flags bad bounds") {
  Instance t3 = testing::t3();
  PricingProblem p = root_problem(3);
  p.forbidden = {Coalition{0b011}};
  LinearizedModel m = linearize_edge_sum(t3, p);
  REQUIRE_THROWS_AS(evaluate_linearized(m, Coalition{0b011}), std::invalid_argument);
  REQUIRE_NOTHROW(evaluate_linearized(m, Coalition{0b111}));

  m.hi[1] = -100.0;  // deliberately broken bound
  REQUIRE_THROWS_AS(evaluate_linearized(m, Coalition{0b111}), Error);
}

TEST_CASE("LP export shape: T3 edge-sum") {
  Instance t3 = testing::t3();
  PricingProblem p = root_problem(3);
  LinearizedModel m = linearize_edge_sum(t3, p);
  std::ostringstream os;
  export_lp(m, os);
  LpFileShape shape = read_lp_shape(os.str());
  REQUIRE(shape.binaries == 3);
  REQUIRE(shape.continuous == 3);
  REQUIRE(shape.rows == 12);  // 4n Glover rows, no forbidden rows
  REQUIRE(shape.quad_rows == 0);
  REQUIRE(!shape.quad_in_objective);

  p.forbidden = {Coalition{0b011}, Coalition{0b100}};
  LinearizedModel mf = linearize_edge_sum(t3, p);
  std::ostringstream osf;
  export_lp(mf, osf);
  REQUIRE(read_lp_shape(osf.str()).rows == 14);  // + |J| forbidden rows
  REQUIRE(osf.str().find(" f1: ") != std::string::npos);
  REQUIRE(osf.str().find(" f2: ") != std::string::npos);
  REQUIRE(osf.str().find(" g12: ") != std::string::npos);
}

TEST_CASE("LP export shape: coordination is quadratically constrained") {
  Instance k3 = testing::k3_unit();
  LinearizedModel m = reduce_coordination(k3, root_problem(3));
  std::ostringstream os;
  export_lp(m, os);
  LpFileShape shape = read_lp_shape(os.str());
  REQUIRE(shape.binaries == 3);
  REQUIRE(shape.continuous == 3);
  REQUIRE(shape.rows == 12);
  REQUIRE(shape.quad_rows > 0);            // quadratic terms in constraints
  REQUIRE(!shape.quad_in_objective);       // none in the objective
  REQUIRE(os.str().find("z1") != std::string::npos);
}

TEST_CASE("second-stage coordination export is fully linear") {
  Instance k3 = testing::k3_unit();
  LinearizedModel m = reduce_coordination(k3, root_problem(3));
  std::ostringstream os;
  ExportOptions opts;
  opts.second_stage = true;
  export_lp(m, os, opts);
  LpFileShape shape = read_lp_shape(os.str());
  REQUIRE(shape.quad_rows == 0);
  REQUIRE(shape.rows == 12 + 4 * 6);  // 4n z-rows + 4 per ordered pair
  REQUIRE(shape.continuous == 3 + 6);
  REQUIRE(os.str().find("z1_2") != std::string::npos);

  Instance t3 = testing::t3();
  LinearizedModel me = linearize_edge_sum(t3, root_problem(3));
  REQUIRE_THROWS_AS(export_lp(me, os, opts), std::invalid_argument);
}
