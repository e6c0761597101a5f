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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csg/instance.hpp"
#include "csg/report.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace csg;

namespace {

struct CommandResult {
  int exit_code;
  std::string out;
};

/// Runs the CLI with stdout captured and stderr dropped to a file.
CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_file =
      fs::temp_directory_path() / ("csg_cli_out_" + std::to_string(counter++));
  const std::string cmd = std::string(CSG_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(out_file);
  return {WEXITSTATUS(raw), ss.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "csg_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_t3() {
  const fs::path path = scratch_dir() / "T3";
  std::ofstream out(path);
  write_instance(testing::t3(), out);
  return path;
}

}  // namespace

TEST_CASE("generate writes the expected file names deterministically") {
  const fs::path dir = scratch_dir() / "gen1";
  fs::remove_all(dir);
  CommandResult r = run_cli("generate --kind edge_sum --n 10 --p 0.8 --count 5 "
                            "--seed 1 --out-dir " + dir.string());
  REQUIRE(r.exit_code == 0);
  for (int s = 0; s < 5; ++s) {
    const std::string name = "p0.8n10s" + std::to_string(s);
    REQUIRE(r.out.find(name) != std::string::npos);
    REQUIRE(fs::exists(dir / name));
  }

  // identical flags produce identical bytes
  const fs::path dir2 = scratch_dir() / "gen2";
  fs::remove_all(dir2);
  REQUIRE(run_cli("generate --kind edge_sum --n 10 --p 0.8 --count 5 --seed 1 "
                  "--out-dir " + dir2.string()).exit_code == 0);
  for (int s = 0; s < 5; ++s) {
    const std::string name = "p0.8n10s" + std::to_string(s);
    std::ifstream a(dir / name), b(dir2 / name);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    REQUIRE(sa.str() == sb.str());
  }
}

TEST_CASE("generate requires --p-sign for correlation") {
  CommandResult r = run_cli("generate --kind correlation --n 6 --p 0.5 --out-dir " +
                            scratch_dir().string());
  REQUIRE(r.exit_code == 2);
  CommandResult ok = run_cli(
      "generate --kind correlation --n 6 --p 0.5 --p-sign 0.6 --out-dir " +
      (scratch_dir() / "corr").string());
  REQUIRE(ok.exit_code == 0);
}

TEST_CASE("generate rejects bad flags") {
  REQUIRE(run_cli("generate --kind nonsense --n 5 --p 0.5").exit_code == 2);
  REQUIRE(run_cli("generate --kind edge_sum --n 5 --p 1.5").exit_code == 2);
  REQUIRE(run_cli("generate --kind edge_sum --n 90 --p 0.5").exit_code == 2);
}

TEST_CASE("CSG_SEED provides the default seed") {
  const fs::path da = scratch_dir() / "env_a";
  const fs::path db = scratch_dir() / "env_b";
  fs::remove_all(da);
  fs::remove_all(db);
  REQUIRE(run_cli("generate --kind edge_sum --n 8 --p 0.7 --seed 99 --out-dir " +
                  da.string()).exit_code == 0);
  // same generation driven by the environment default
  const std::string cmd = "CSG_SEED=99 " + std::string(CSG_CLI_PATH) +
                          " generate --kind edge_sum --n 8 --p 0.7 --out-dir " +
                          db.string() + " >/dev/null 2>&1";
  fs::remove_all(db);
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream a(da / "p0.7n8s0"), b(db / "p0.7n8s0");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  REQUIRE(sa.str() == sb.str());
}

TEST_CASE("solve reports T3 and verifies against the oracle") {
  const fs::path t3 = write_t3();
  CommandResult r = run_cli("solve " + t3.string() + " --exact --verify --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::ordered_json::parse(r.out);
  REQUIRE(j["name"] == "T3");
  REQUIRE(j["lp"].get<double>() == Catch::Approx(3.0));
  REQUIRE(j["ilp"].get<double>() == Catch::Approx(3.0));
  REQUIRE(j["nodes"] == 1);
  REQUIRE(j["proven"] == true);
  REQUIRE(j["partition"].size() == 2);
  RunRecord rec = RunRecord::from_json(j);
  REQUIRE(rec.ilp == j["ilp"].get<double>());
  REQUIRE(compute_gap(rec.lp, rec.ilp) == Catch::Approx(rec.gap).margin(1e-12));
}

TEST_CASE("solve CSV output carries the documented header") {
  const fs::path t3 = write_t3();
  CommandResult r = run_cli("solve " + t3.string() + " --csv");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  REQUIRE(header == "name,lp,ilp,t_total,t_root,t_node,nodes,vars,int_sols,gap");
  REQUIRE(row.rfind("T3,", 0) == 0);
  REQUIRE(row.find("0.00%") != std::string::npos);
}

TEST_CASE("solve exit codes: bad flags, missing file, node limit") {
  const fs::path t3 = write_t3();
  REQUIRE(run_cli("solve").exit_code == 2);
  REQUIRE(run_cli("solve /nonexistent/file").exit_code == 3);
  REQUIRE(run_cli("solve " + t3.string() + " --json --csv").exit_code == 2);

  // a branching instance terminated at node 1 exits 4 and reports nodes=1
  const fs::path dir = scratch_dir() / "limit";
  fs::remove_all(dir);
  REQUIRE(run_cli("generate --kind coordination --n 7 --p 0.9 --seed 3 "
                  "--out-dir " + dir.string()).exit_code == 0);
  const fs::path inst = dir / "p0.9n7s0";
  CommandResult full = run_cli("solve " + inst.string() + " --json");
  auto jf = nlohmann::ordered_json::parse(full.out);
  CommandResult limited = run_cli("solve " + inst.string() + " --node-limit 1 --json");
  auto jl = nlohmann::ordered_json::parse(limited.out);
  REQUIRE(jl["nodes"] == 1);
  if (jf["nodes"].get<long>() > 1) {
    REQUIRE(limited.exit_code == 4);
    REQUIRE(jl["proven"] == false);
  }
}

TEST_CASE("paper-mode matches exact when it exits clean") {
  const fs::path dir = scratch_dir() / "paper";
  fs::remove_all(dir);
  REQUIRE(run_cli("generate --kind edge_sum --n 10 --p 0.8 --count 3 --seed 21 "
                  "--out-dir " + dir.string()).exit_code == 0);
  for (int s = 0; s < 3; ++s) {
    const std::string inst = (dir / ("p0.8n10s" + std::to_string(s))).string();
    CommandResult exact = run_cli("solve " + inst + " --exact --json");
    CommandResult paper = run_cli("solve " + inst + " --paper-mode --json");
    if (paper.exit_code == 0) {
      auto je = nlohmann::ordered_json::parse(exact.out);
      auto jp = nlohmann::ordered_json::parse(paper.out);
      REQUIRE(je["ilp"].get<double>() == Catch::Approx(jp["ilp"].get<double>()));
    }
  }
}

TEST_CASE("export-lp writes the root model") {
  const fs::path t3 = write_t3();
  const fs::path out = scratch_dir() / "t3.lp";
  CommandResult r =
      run_cli("export-lp " + t3.string() + " --root --out " + out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  REQUIRE(text.find("Maximize") != std::string::npos);
  REQUIRE(text.find(" g12: ") != std::string::npos);
  REQUIRE(text.find(" g13: ") == std::string::npos);  // exactly 4n rows
  REQUIRE(text.find("Binaries") != std::string::npos);

  // neither --root nor --duals
  REQUIRE(run_cli("export-lp " + t3.string() + " --out " + out.string()).exit_code ==
          2);
}

TEST_CASE("export-lp validates the duals file dimension") {
  const fs::path t3 = write_t3();
  const fs::path duals = scratch_dir() / "duals.txt";
  {
    std::ofstream d(duals);
    d << "0.5\n-1.0\n";  // only 2 values for n=3
  }
  const fs::path out = scratch_dir() / "t3b.lp";
  REQUIRE(run_cli("export-lp " + t3.string() + " --duals " + duals.string() +
                  " --out " + out.string()).exit_code == 2);
  {
    std::ofstream d(duals);
    d << "0.5\n-1.0\n0.25\n";
  }
  REQUIRE(run_cli("export-lp " + t3.string() + " --duals " + duals.string() +
                  " --out " + out.string()).exit_code == 0);
}

TEST_CASE("bench runs a directory and prints aggregate means") {
  const fs::path dir = scratch_dir() / "benchdir";
  fs::remove_all(dir);
  REQUIRE(run_cli("generate --kind edge_sum --n 9 --p 0.8 --count 5 --seed 8 "
                  "--out-dir " + dir.string()).exit_code == 0);
  CommandResult r = run_cli("bench " + dir.string() + " --verify --jobs 2");
  REQUIRE(r.exit_code == 0);
  for (int s = 0; s < 5; ++s)
    REQUIRE(r.out.find("p0.8n9s" + std::to_string(s)) != std::string::npos);
  REQUIRE(r.out.find("mean") != std::string::npos);

  // row order is sorted by name regardless of directory order
  CommandResult csv = run_cli("bench " + dir.string() + " --csv");
  REQUIRE(csv.exit_code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == std::string(kCsvHeader));
  std::string prev;
  while (std::getline(lines, line)) {
    const std::string name = line.substr(0, line.find(','));
    REQUIRE(prev < name);
    prev = name;
  }
}

TEST_CASE("bench emits a JSON array of records") {
  const fs::path dir = scratch_dir() / "benchjson";
  fs::remove_all(dir);
  REQUIRE(run_cli("generate --kind correlation --n 8 --p 0.6 --p-sign 0.6 "
                  "--count 3 --seed 4 --out-dir " + dir.string()).exit_code == 0);
  CommandResult r = run_cli("bench " + dir.string() + " --json");
  REQUIRE(r.exit_code == 0);
  auto arr = nlohmann::ordered_json::parse(r.out);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 3);
  for (const auto& j : arr) {
    RunRecord rec = RunRecord::from_json(j);
    REQUIRE(rec.proven);
    REQUIRE(rec.lp >= rec.ilp - 1e-6);
  }
}

TEST_CASE("export-lp handles correlation and coordination instances") {
  const fs::path dir = scratch_dir() / "expkinds";
  fs::remove_all(dir);
  REQUIRE(run_cli("generate --kind correlation --n 6 --p 0.8 --p-sign 0.5 "
                  "--seed 2 --out-dir " + dir.string()).exit_code == 0);
  REQUIRE(run_cli("generate --kind coordination --n 6 --p 0.8 --seed 2 "
                  "--out-dir " + dir.string()).exit_code == 0);
  const fs::path corr_lp = dir / "corr.lp";
  REQUIRE(run_cli("export-lp " + (dir / "p0.8pS0.5n6s0").string() + " --root --out " +
                  corr_lp.string()).exit_code == 0);
  std::stringstream corr_text;
  {
    std::ifstream in(corr_lp);
    corr_text << in.rdbuf();
  }
  REQUIRE(corr_text.str().find("0.5") != std::string::npos);  // w' halves
  REQUIRE(corr_text.str().find("[") == std::string::npos);    // linear model

  const fs::path coord_lp = dir / "coord.lp";
  REQUIRE(run_cli("export-lp " + (dir / "p0.8n6s0").string() + " --root --out " +
                  coord_lp.string() + " --second-stage").exit_code == 0);
  std::stringstream coord_text;
  {
    std::ifstream in(coord_lp);
    coord_text << in.rdbuf();
  }
  REQUIRE(coord_text.str().find(" h1: ") != std::string::npos);
  REQUIRE(coord_text.str().find("[") == std::string::npos);  // fully linear
}

TEST_CASE("bench tolerates an empty directory and broken files") {
  const fs::path empty = scratch_dir() / "empty";
  fs::remove_all(empty);
  fs::create_directories(empty);
  REQUIRE(run_cli("bench " + empty.string()).exit_code == 0);

  const fs::path broken = scratch_dir() / "broken";
  fs::remove_all(broken);
  fs::create_directories(broken);
  { std::ofstream f(broken / "junk"); f << "not an instance\n"; }
  {
    std::ofstream f(broken / "T3");
    write_instance(testing::t3(), f);
  }
  CommandResult r = run_cli("bench " + broken.string());
  REQUIRE(r.exit_code == 3);             // failure reported
  REQUIRE(r.out.find("T3") != std::string::npos);  // good one still solved
}
