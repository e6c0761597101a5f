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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csg/csg.hpp"

namespace fs = std::filesystem;
using namespace csg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitLimit = 4;
constexpr int kExitMismatch = 5;

ValuationKind parse_kind(const std::string& s) {
  if (s == "edge_sum") return ValuationKind::edge_sum;
  if (s == "correlation") return ValuationKind::correlation;
  if (s == "coordination") return ValuationKind::coordination;
  throw CLI::ValidationError("--kind", "expected edge_sum|correlation|coordination");
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_instance(in);
}

struct SolveFlags {
  bool paper_mode = false;
  std::optional<long> node_limit;
  std::optional<double> time_limit;
  int top_k = 1;

  SolveConfig config() const {
    SolveConfig cfg = paper_mode ? SolveConfig::paper_mode() : SolveConfig{};
    if (node_limit) cfg.node_limit = node_limit;
    if (time_limit) cfg.time_limit = time_limit;
    cfg.top_k = top_k;
    return cfg;
  }
};

void add_solve_flags(CLI::App* cmd, SolveFlags& flags) {
  auto* paper = cmd->add_flag("--paper-mode", flags.paper_mode,
                              "limit the branching tree to 40 nodes");
  auto* limit = cmd->add_option("--node-limit", flags.node_limit,
                                "stop after this many tree nodes");
  auto* exact =
      cmd->add_flag("--exact", "run to proven optimality (the default)");
  paper->excludes(limit);
  paper->excludes(exact);
  limit->excludes(exact);
  cmd->add_option("--time-limit", flags.time_limit, "CPU-seconds budget");
  cmd->add_option("--top-k", flags.top_k, "columns added per pricing round (1..5)")
      ->check(CLI::Range(1, 5));
}

int run_verify(const Instance& inst, const SolveReport& rep, std::ostream& err) {
  if (inst.n() > 14) {
    err << "verify: skipped (n > 14 exceeds the enumeration oracle guard)\n";
    return kExitOk;
  }
  VerifyResult v = verify_report(inst, rep);
  if (!v.pass) {
    err << "verify: MISMATCH " << v.detail << "\n";
    return kExitMismatch;
  }
  err << "verify: ok (oracle optimum " << v.oracle_value << ")\n";
  return kExitOk;
}

int cmd_generate(const std::string& kind_str, int n, double p,
                 std::optional<double> p_sign, int count, std::uint64_t seed,
                 const std::string& out_dir, double sigma, double mu,
                 const std::string& weights) {
  const ValuationKind kind = parse_kind(kind_str);
  if (kind == ValuationKind::correlation && !p_sign)
    throw CLI::RequiredError("--p-sign (required for correlation)");
  GenSpec spec;
  spec.n = n;
  spec.p = p;
  spec.sigma = sigma;
  spec.mu = mu;
  spec.p_sign = p_sign.value_or(0.5);
  if (!weights.empty())
    spec.weights = weights == "unit" ? WeightMode::unit : WeightMode::gaussian;
  else  // characteristic-function default for coordination
    spec.weights = kind == ValuationKind::coordination ? WeightMode::unit
                                                       : WeightMode::gaussian;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  for (long s = 0; s < count; ++s) {
    spec.s = s;
    spec.seed = seed + static_cast<std::uint64_t>(s);
    Instance inst = generate_gilbert(spec, kind);
    const fs::path path = fs::path(out_dir) / inst.name();
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_instance(inst, out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_solve(const std::string& path, const SolveFlags& flags, bool as_json,
              bool as_csv, bool verify) {
  Instance inst = load_instance(path);
  SolveReport rep = solve(inst, flags.config());
  RunRecord rec = RunRecord::from(rep);
  if (as_json) {
    std::cout << rec.to_json().dump(2) << "\n";
  } else if (as_csv) {
    std::cout << kCsvHeader << "\n" << rec.to_csv_row() << "\n";
  } else {
    print_record_table(std::cout, {rec});
    std::cout << "partition:";
    for (const auto& cls : rec.partition) {
      std::cout << " {";
      for (std::size_t i = 0; i < cls.size(); ++i)
        std::cout << (i ? "," : "") << cls[i];
      std::cout << "}";
    }
    std::cout << "\n";
  }
  if (verify) {
    const int rc = run_verify(inst, rep, std::cerr);
    if (rc != kExitOk) return rc;
  }
  return rep.proven ? kExitOk : kExitLimit;
}

int cmd_export_lp(const std::string& path, bool root, const std::string& duals_file,
                  const std::string& out_file, bool second_stage) {
  Instance inst = load_instance(path);
  PricingProblem p;
  p.free = Coalition::full(inst.n());
  p.duals.assign(static_cast<std::size_t>(inst.n()), 0.0);
  if (!root) {
    std::ifstream in(duals_file);
    if (!in) throw Error("cannot open '" + duals_file + "'");
    std::vector<double> pi;
    double v;
    while (in >> v) pi.push_back(v);
    if (static_cast<int>(pi.size()) != inst.n())
      throw CLI::ValidationError("--duals", "expected " + std::to_string(inst.n()) +
                                                " values, got " +
                                                std::to_string(pi.size()));
    p.duals = std::move(pi);
  }
  LinearizedModel model = linearize(inst, p);
  std::ofstream out(out_file);
  if (!out) throw Error("cannot write '" + out_file + "'");
  ExportOptions opts;
  opts.second_stage = second_stage;
  export_lp(model, out, opts);
  if (!out) throw Error("write failed for '" + out_file + "'");
  std::cout << out_file << "\n";
  return kExitOk;
}

struct BenchRow {
  std::string file;
  std::optional<RunRecord> record;
  std::string error;
  int verify_rc = kExitOk;
};

int cmd_bench(const std::string& dir, const SolveFlags& flags, int jobs, bool verify,
              bool as_csv, bool as_json) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  const SolveConfig cfg = flags.config();
  auto run_one = [&cfg, verify](const fs::path& file) {
    BenchRow row;
    row.file = file.filename().string();
    try {
      Instance inst = [&] {
        std::ifstream in(file);
        if (!in) throw Error("cannot open '" + file.string() + "'");
        return parse_instance(in);
      }();
      SolveReport rep = solve(inst, cfg);
      row.record = RunRecord::from(rep);
      if (verify && inst.n() <= 14 && !verify_report(inst, rep).pass)
        row.verify_rc = kExitMismatch;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };

  std::vector<BenchRow> rows(files.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) rows[i] = run_one(files[i]);
  } else {
    std::vector<std::future<BenchRow>> futures;
    std::size_t next = 0;
    while (next < files.size() || !futures.empty()) {
      while (next < files.size() && static_cast<int>(futures.size()) < jobs) {
        futures.push_back(
            std::async(std::launch::async, run_one, files[next]));
        ++next;
      }
      const std::size_t done = next - futures.size();
      rows[done] = futures.front().get();
      futures.erase(futures.begin());
    }
  }

  int exit_code = kExitOk;
  std::vector<RunRecord> ok_rows;
  for (const BenchRow& row : rows) {
    if (row.record) {
      ok_rows.push_back(*row.record);
      if (!row.record->proven && exit_code == kExitOk) exit_code = kExitLimit;
      if (row.verify_rc != kExitOk) exit_code = kExitMismatch;
    } else {
      std::cerr << row.file << ": FAILED: " << row.error << "\n";
      if (exit_code != kExitMismatch) exit_code = kExitIo;
    }
  }
  if (as_json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const RunRecord& r : ok_rows) arr.push_back(r.to_json());
    std::cout << arr.dump(2) << "\n";
  } else if (as_csv) {
    std::cout << kCsvHeader << "\n";
    for (const RunRecord& r : ok_rows) std::cout << r.to_csv_row() << "\n";
  } else {
    print_record_table(std::cout, ok_rows);
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact branch-and-price solver for coalition structure "
               "generation over graphs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write random Gilbert instances");
  std::string kind_str, out_dir = ".", weights;
  int n = 0, count = 1;
  double p = 0.0, sigma = 0.2, mu = 0.0;
  std::optional<double> p_sign;
  std::uint64_t seed = 0;
  bool seed_given = false;
  gen->add_option("--kind", kind_str, "edge_sum|correlation|coordination")
      ->required();
  gen->add_option("--n", n, "agent count")->required()->check(CLI::Range(1, 64));
  gen->add_option("--p", p, "edge probability")->required()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--p-sign", p_sign, "plus-sign probability (correlation)");
  gen->add_option("--count", count, "number of instances (s = 0..count-1)")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "base RNG seed; instance s uses seed+s")
      ->each([&](const std::string&) { seed_given = true; });
  gen->add_option("--out-dir", out_dir, "output directory");
  gen->add_option("--sigma", sigma, "Gaussian std-dev (default 0.2)");
  gen->add_option("--mu", mu, "Gaussian mean (default 0)");
  gen->add_option("--weights", weights,
                  "unit|gaussian (default: unit for coordination, gaussian "
                  "otherwise)")
      ->check(CLI::IsMember({"unit", "gaussian"}));

  // solve
  auto* sol = app.add_subcommand("solve", "solve one instance file");
  std::string solve_path;
  SolveFlags solve_flags;
  bool solve_json = false, solve_csv = false, solve_verify = false;
  sol->add_option("instance", solve_path, "instance file")->required();
  add_solve_flags(sol, solve_flags);
  auto* json_f = sol->add_flag("--json", solve_json, "emit the JSON report");
  auto* csv_f = sol->add_flag("--csv", solve_csv, "emit the CSV report");
  json_f->excludes(csv_f);
  sol->add_flag("--verify", solve_verify,
                "check against the enumeration oracle (n <= 14)");

  // export-lp
  auto* exp = app.add_subcommand("export-lp", "write the pricing model as .lp");
  std::string exp_path, exp_out, exp_duals;
  bool exp_root = false, exp_second = false;
  exp->add_option("instance", exp_path, "instance file")->required();
  auto* root_f = exp->add_flag("--root", exp_root, "root model: pi = 0, no "
                                                   "forbidden rows");
  auto* duals_f = exp->add_option("--duals", exp_duals,
                                  "file with one dual value per agent");
  root_f->excludes(duals_f);
  exp->add_option("--out", exp_out, "output .lp path")->required();
  exp->add_flag("--second-stage", exp_second,
                "fully linear coordination variant (z_ij)");

  // bench
  auto* bench = app.add_subcommand("bench", "solve every instance in a directory");
  std::string bench_dir;
  SolveFlags bench_flags;
  int bench_jobs = 1;
  bool bench_verify = false, bench_csv = false, bench_json = false;
  bench->add_option("dir", bench_dir, "directory of instance files")->required();
  add_solve_flags(bench, bench_flags);
  bench->add_option("--jobs", bench_jobs, "parallel workers")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--verify", bench_verify, "oracle check where n <= 14");
  auto* bcsv = bench->add_flag("--csv", bench_csv, "CSV output");
  auto* bjson = bench->add_flag("--json", bench_json, "JSON output");
  bcsv->excludes(bjson);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help/error text
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      if (!seed_given)
        if (const char* env = std::getenv("CSG_SEED")) seed = std::strtoull(env, nullptr, 10);
      return cmd_generate(kind_str, n, p, p_sign, count, seed, out_dir, sigma, mu,
                          weights);
    }
    if (*sol) return cmd_solve(solve_path, solve_flags, solve_json, solve_csv,
                               solve_verify);
    if (*exp) {
      if (!exp_root && exp_duals.empty())  // --root/--duals: exactly one
        throw CLI::RequiredError("one of --root / --duals");
      return cmd_export_lp(exp_path, exp_root, exp_duals, exp_out, exp_second);
    }
    if (*bench) return cmd_bench(bench_dir, bench_flags, bench_jobs, bench_verify,
                                 bench_csv, bench_json);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
