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

#ifndef CSG_REPORT_HPP
#define CSG_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csg/coalition.hpp"
#include "csg/instance.hpp"

namespace csg {

struct SolveReport {
  std::string name;
  ValuationKind kind{};
  int n = 0;
  double lp_root = 0.0;
  double best_int = 0.0;
  Partition best_partition;
  double gap = 0.0;  // (lp_root - best_int) / |best_int|, as a fraction
  long nodes = 0;
  long columns_total = 0;
  long int_solutions = 0;
  double time_total = 0.0;
  double time_root = 0.0;
  double time_per_node = 0.0;
  bool proven = false;

  // Per-node values in processing order, for bound-monotonicity checks.
  struct NodeTrace {
    int depth;
    long parent;  // index into trace, -1 for root
    double value;
    bool integral;
  };
  std::vector<NodeTrace> trace;
};

/// Relative gap; falls back to the absolute difference around a zero
/// incumbent so it stays defined.
inline double compute_gap(double lp, double ilp) {
  return std::fabs(ilp) > 1e-12 ? (lp - ilp) / std::fabs(ilp) : lp - ilp;
}

inline std::string format_gap(double gap) {
  double percent = gap * 100.0;
  if (std::fabs(percent) < 0.005) percent = 0.0;  // avoid "-0.00%"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", percent);
  return buf;
}

inline const char* kCsvHeader = "name,lp,ilp,t_total,t_root,t_node,nodes,vars,int_sols,gap";

/// One benchmark row in the Table-1 layout.
struct RunRecord {
  std::string name;
  double lp = 0.0;
  double ilp = 0.0;
  double t_total = 0.0;
  double t_root = 0.0;
  double t_node = 0.0;
  long nodes = 0;
  long vars = 0;
  long int_sols = 0;
  double gap = 0.0;
  bool proven = true;
  std::vector<std::vector<int>> partition;  // 1-based members

  static RunRecord from(const SolveReport& r) {
    RunRecord rec;
    rec.name = r.name;
    rec.lp = r.lp_root;
    rec.ilp = r.best_int;
    rec.t_total = r.time_total;
    rec.t_root = r.time_root;
    rec.t_node = r.time_per_node;
    rec.nodes = r.nodes;
    rec.vars = r.columns_total;
    rec.int_sols = r.int_solutions;
    rec.gap = r.gap;
    rec.proven = r.proven;
    for (Coalition c : r.best_partition.normalized().classes) {
      std::vector<int> members;
      c.for_each([&](int i) { members.push_back(i + 1); });
      rec.partition.push_back(std::move(members));
    }
    return rec;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "csg-report-v1";
    j["name"] = name;
    j["lp"] = lp;
    j["ilp"] = ilp;
    j["gap"] = gap;
    j["nodes"] = nodes;
    j["vars"] = vars;
    j["int_sols"] = int_sols;
    j["proven"] = proven;
    j["partition"] = partition;
    j["t_total"] = t_total;
    j["t_root"] = t_root;
    j["t_node"] = t_node;
    return j;
  }

  static RunRecord from_json(const nlohmann::ordered_json& j) {
    RunRecord rec;
    rec.name = j.at("name").get<std::string>();
    rec.lp = j.at("lp").get<double>();
    rec.ilp = j.at("ilp").get<double>();
    rec.gap = j.at("gap").get<double>();
    rec.nodes = j.at("nodes").get<long>();
    rec.vars = j.at("vars").get<long>();
    rec.int_sols = j.at("int_sols").get<long>();
    rec.proven = j.at("proven").get<bool>();
    rec.partition = j.at("partition").get<std::vector<std::vector<int>>>();
    rec.t_total = j.at("t_total").get<double>();
    rec.t_root = j.at("t_root").get<double>();
    rec.t_node = j.at("t_node").get<double>();
    return rec;
  }

  std::string to_csv_row() const {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.3f,%.3f,%.3f,%ld,%ld,%ld,%s",
                  name.c_str(), lp, ilp, t_total, t_root, t_node, nodes, vars,
                  int_sols, format_gap(gap).c_str());
    return buf;
  }
};

inline void print_record_table(std::ostream& out, const std::vector<RunRecord>& rows) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%-22s %12s %12s %9s %8s %8s %6s %6s %9s %8s",
                "instance", "LP", "ILP", "t_total", "t_root", "t_node", "nodes",
                "vars", "int.sol", "gap");
  out << buf << "\n";
  double mlp = 0, milp = 0, mt = 0, mgap = 0;
  long mnodes = 0, mvars = 0;
  for (const RunRecord& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-22s %12.3f %12.3f %9.3f %8.3f %8.3f %6ld %6ld %9ld %8s%s",
                  r.name.c_str(), r.lp, r.ilp, r.t_total, r.t_root, r.t_node, r.nodes,
                  r.vars, r.int_sols, format_gap(r.gap).c_str(),
                  r.proven ? "" : "  (not proven)");
    out << buf << "\n";
    mlp += r.lp;
    milp += r.ilp;
    mt += r.t_total;
    mgap += r.gap;
    mnodes += r.nodes;
    mvars += r.vars;
  }
  if (rows.size() > 1) {
    const double k = static_cast<double>(rows.size());
    std::snprintf(buf, sizeof buf,
                  "%-22s %12.3f %12.3f %9.3f %8s %8s %6.1f %6.1f %9s %8s", "mean",
                  mlp / k, milp / k, mt / k, "", "", mnodes / k, mvars / k, "",
                  format_gap(mgap / k).c_str());
    out << buf << "\n";
  }
}

}  // namespace csg

#endif  // CSG_REPORT_HPP
