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

#ifndef CSG_INSTANCE_HPP
#define CSG_INSTANCE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csg/coalition.hpp"
#include "csg/util.hpp"

namespace csg {

enum class ValuationKind { edge_sum, correlation, coordination };

inline const char* to_string(ValuationKind k) {
  switch (k) {
    case ValuationKind::edge_sum: return "edge_sum";
    case ValuationKind::correlation: return "correlation";
    case ValuationKind::coordination: return "coordination";
  }
  return "?";
}

enum class Sign : std::uint8_t { none, plus, minus };

struct Edge {
  int i = 0;  // 0-based, i < j
  int j = 0;
  double weight = 0.0;
  Sign sign = Sign::none;
};

/// Immutable weighted/signed graph instance. Construction validates the
/// whole edge set; afterwards the object is safe to share across threads.
class Instance {
 public:
  Instance(int n, ValuationKind kind, std::vector<Edge> edges, std::string name)
      : n_(n), kind_(kind), edges_(std::move(edges)), name_(std::move(name)) {
    if (n_ < 1) throw std::invalid_argument("instance: n must be >= 1");
    if (n_ > kMaxAgents)
      throw std::invalid_argument("instance: at most 64 agents supported");
    std::set<std::pair<int, int>> seen;
    adj_.assign(static_cast<std::size_t>(n_), Coalition{});
    adj_plus_.assign(static_cast<std::size_t>(n_), Coalition{});
    adj_minus_.assign(static_cast<std::size_t>(n_), Coalition{});
    wmat_ = SquareMatrix(n_);
    unit_weights_ = true;
    for (const Edge& e : edges_) {
      if (e.i < 0 || e.j >= n_ || e.i >= e.j) {
        if (e.i == e.j)
          throw std::invalid_argument("instance: self-loop " + std::to_string(e.i + 1));
        throw std::invalid_argument("instance: bad edge endpoints");
      }
      if (!seen.insert({e.i, e.j}).second)
        throw std::invalid_argument("instance: duplicate edge " + std::to_string(e.i + 1) +
                                    " " + std::to_string(e.j + 1));
      if (kind_ == ValuationKind::correlation) {
        if (e.sign == Sign::none)
          throw std::invalid_argument("instance: correlation edge without sign");
      } else if (e.sign != Sign::none) {
        throw std::invalid_argument("instance: sign on non-correlation edge");
      }
      adj_[e.i].add(e.j);
      adj_[e.j].add(e.i);
      if (e.sign == Sign::plus) {
        adj_plus_[e.i].add(e.j);
        adj_plus_[e.j].add(e.i);
      } else if (e.sign == Sign::minus) {
        adj_minus_[e.i].add(e.j);
        adj_minus_[e.j].add(e.i);
      }
      wmat_.set_sym(e.i, e.j, e.weight);
      if (e.weight != 1.0) unit_weights_ = false;
    }
  }

  int n() const { return n_; }
  ValuationKind kind() const { return kind_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& name() const { return name_; }

  double weight(int i, int j) const { return wmat_.at(i, j); }
  const SquareMatrix& weights() const { return wmat_; }
  Coalition adjacency(int i) const { return adj_[i]; }
  Coalition plus_adjacency(int i) const { return adj_plus_[i]; }
  Coalition minus_adjacency(int i) const { return adj_minus_[i]; }
  /// All edge weights equal to 1 (the edge characteristic function).
  bool unit_weights() const { return unit_weights_; }

 private:
  int n_;
  ValuationKind kind_;
  std::vector<Edge> edges_;
  std::string name_;
  std::vector<Coalition> adj_, adj_plus_, adj_minus_;
  SquareMatrix wmat_;
  bool unit_weights_;
};

// ---------------------------------------------------------------------------
// Random generation (Gilbert model)
// ---------------------------------------------------------------------------

namespace rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 (Steele, Lea, Vigna). Used only to seed the main streams.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256** (Blackman & Vigna). One independent stream per purpose:
/// stream 0 decides the topology, stream 1 draws weights/signs, so the
/// topology of a given (n, p, seed) is identical across valuation kinds.
class Xoshiro256ss {
 public:
  Xoshiro256ss(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm{seed + stream * kGolden};
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Box-Muller transform; one spare value cached between calls.
  double gaussian(double mu, double sigma) {
    if (has_spare_) {
      has_spare_ = false;
      return mu + sigma * spare_;
    }
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mu + sigma * r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rng

enum class WeightMode { gaussian, unit };

struct GenSpec {
  int n = 0;
  double p = 0.0;       // edge probability
  double sigma = 0.2;   // Gaussian std-dev
  double mu = 0.0;      // Gaussian mean
  double p_sign = 0.5;  // plus-sign probability (correlation only)
  long s = 0;           // instance index
  std::uint64_t seed = 0;
  WeightMode weights = WeightMode::gaussian;

  void validate() const {
    if (n < 1 || n > kMaxAgents) throw std::invalid_argument("genspec: bad n");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("genspec: p outside [0,1]");
    if (p_sign < 0.0 || p_sign > 1.0)
      throw std::invalid_argument("genspec: p_sign outside [0,1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("genspec: sigma must be > 0");
  }
};

/// Benchmark-file name: p{p}n{n}s{s}, correlation adds pS{p_sign};
/// probabilities printed to one decimal.
inline std::string instance_name(const GenSpec& spec, ValuationKind kind) {
  char buf[96];
  if (kind == ValuationKind::correlation) {
    std::snprintf(buf, sizeof buf, "p%.1fpS%.1fn%ds%ld", spec.p, spec.p_sign, spec.n,
                  spec.s);
  } else {
    std::snprintf(buf, sizeof buf, "p%.1fn%ds%ld", spec.p, spec.n, spec.s);
  }
  return buf;
}

/// Gilbert model: every unordered pair appears independently with
/// probability p. Weighted kinds draw N(mu, sigma) per present edge (or
/// unit weights when requested); correlation draws a sign per edge.
inline Instance generate_gilbert(const GenSpec& spec, ValuationKind kind) {
  spec.validate();
  rng::Xoshiro256ss topology(spec.seed, 0);
  rng::Xoshiro256ss attrs(spec.seed, 1);
  std::vector<Edge> edges;
  for (int i = 0; i < spec.n; ++i)
    for (int j = i + 1; j < spec.n; ++j)
      if (topology.uniform() < spec.p) edges.push_back({i, j, 0.0, Sign::none});
  for (Edge& e : edges) {
    if (kind == ValuationKind::correlation) {
      e.sign = attrs.uniform() < spec.p_sign ? Sign::plus : Sign::minus;
    } else if (spec.weights == WeightMode::unit) {
      e.weight = 1.0;
    } else {
      e.weight = attrs.gaussian(spec.mu, spec.sigma);
    }
  }
  return Instance(spec.n, kind, std::move(edges), instance_name(spec, kind));
}

// ---------------------------------------------------------------------------
// Text format
//
//   csg 1
//   n <n> kind <edge_sum|correlation|coordination> name <string>
//   # comment
//   <i> <j> <weight>      (weighted kinds)
//   <i> <j> <+|->          (correlation)
//
// 1-based endpoints, UTF-8, LF line endings.
// ---------------------------------------------------------------------------

struct ParseError : Error {
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

inline void write_instance(const Instance& inst, std::ostream& out) {
  out << "csg 1\n";
  out << "n " << inst.n() << " kind " << to_string(inst.kind()) << " name "
      << inst.name() << "\n";
  char buf[64];
  for (const Edge& e : inst.edges()) {
    if (inst.kind() == ValuationKind::correlation) {
      out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << (e.sign == Sign::plus ? '+' : '-')
          << '\n';
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", e.weight);
      out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << buf << '\n';
    }
  }
}

inline std::string write_instance_string(const Instance& inst) {
  std::ostringstream os;
  write_instance(inst, os);
  return os.str();
}

inline Instance parse_instance(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_content_line()) throw ParseError(lineno, "missing 'csg 1' header");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "csg" || version != 1)
      throw ParseError(lineno, "expected header 'csg 1'");
  }

  if (!next_content_line()) throw ParseError(lineno, "missing instance header line");
  int n = 0;
  ValuationKind kind{};
  std::string name;
  {
    std::istringstream ls(line);
    std::string key, kindstr;
    if (!(ls >> key >> n) || key != "n" || n < 1)
      throw ParseError(lineno, "expected 'n <count>'");
    if (n > kMaxAgents) throw ParseError(lineno, "at most 64 agents supported");
    if (!(ls >> key >> kindstr) || key != "kind")
      throw ParseError(lineno, "expected 'kind <valuation>'");
    if (kindstr == "edge_sum")
      kind = ValuationKind::edge_sum;
    else if (kindstr == "correlation")
      kind = ValuationKind::correlation;
    else if (kindstr == "coordination")
      kind = ValuationKind::coordination;
    else
      throw ParseError(lineno, "unknown valuation kind '" + kindstr + "'");
    if (!(ls >> key) || key != "name")
      throw ParseError(lineno, "expected 'name <string>'");
    std::getline(ls, name);
    std::size_t start = name.find_first_not_of(' ');
    name = start == std::string::npos ? std::string{} : name.substr(start);
    while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
  }

  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;
  while (next_content_line()) {
    std::istringstream ls(line);
    int i = 0, j = 0;
    if (!(ls >> i >> j)) throw ParseError(lineno, "malformed edge line");
    if (i == j) throw ParseError(lineno, "self-loop " + std::to_string(i));
    if (i < 1 || j < 1 || i > n || j > n)
      throw ParseError(lineno, "edge endpoint out of range 1.." + std::to_string(n));
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second)
      throw ParseError(lineno, "duplicate edge " + std::to_string(i) + " " +
                                   std::to_string(j));
    Edge e{i - 1, j - 1, 0.0, Sign::none};
    if (kind == ValuationKind::correlation) {
      std::string sign;
      if (!(ls >> sign) || (sign != "+" && sign != "-"))
        throw ParseError(lineno, "correlation edge needs sign '+' or '-'");
      e.sign = sign == "+" ? Sign::plus : Sign::minus;
    } else {
      if (!(ls >> e.weight)) throw ParseError(lineno, "edge weight missing");
    }
    std::string rest;
    if (ls >> rest) throw ParseError(lineno, "trailing tokens on edge line");
    edges.push_back(e);
  }
  return Instance(n, kind, std::move(edges), std::move(name));
}

inline Instance parse_instance_string(const std::string& text) {
  std::istringstream is(text);
  return parse_instance(is);
}

}  // namespace csg

#endif  // CSG_INSTANCE_HPP
