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

#ifndef CSG_UTIL_HPP
#define CSG_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <ctime>
#include <stdexcept>
#include <string>
#include <vector>

namespace csg {

/// Process CPU time in seconds (millisecond resolution is enough for reports).
inline double cpu_seconds() {
  return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

inline bool is_integral(double v, double tol = 0.0) {
  return std::fabs(v - std::round(v)) <= tol;
}

/// Multiples of 1/2 are exactly representable; correlation values must be one.
inline bool is_half_integral(double v, double tol = 0.0) {
  return std::fabs(2.0 * v - std::round(2.0 * v)) <= tol;
}

/// Dense symmetric weight table with zero diagonal.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  void set_sym(int i, int j, double v) {
    at(i, j) = v;
    at(j, i) = v;
  }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace csg

#endif  // CSG_UTIL_HPP
