// Copyright 2026 The MIENF Authors.
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

#pragma once

#include <random>
#include <vector>

#include "common/rng.hpp"
#include "numerics/matrix.hpp"
#include "oracles.hpp"

namespace testing {

using mienf::numerics::Matrix;
using mienf::numerics::Vector;

inline oracle::Dense to_dense(const Matrix& m) {
  oracle::Dense out = oracle::zeros(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Matrix from_dense(const oracle::Dense& d) {
  Matrix out(d.size(), d.front().size());
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t c = 0; c < d.front().size(); ++c) out(r, c) = d[r][c];
  return out;
}

inline std::vector<double> row_vector(const Matrix& m, std::size_t r) {
  auto row = m.row(r);
  return {row.begin(), row.end()};
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// A Aᵀ + d I for a random Gaussian A.
inline Matrix random_spd(std::size_t d, std::mt19937_64& rng, double ridge = 0.5) {
  const Matrix a = gaussian_matrix(d, d, rng);
  Matrix s = a * a.transpose();
  for (std::size_t i = 0; i < d; ++i) s(i, i) += ridge;
  return s;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace testing
