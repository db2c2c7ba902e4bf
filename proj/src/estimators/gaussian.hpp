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

#include "numerics/matrix.hpp"

namespace mienf::estimators {

using numerics::Matrix;
using numerics::Vector;

/// ½[log det Σ_xx + log det Σ_yy − log det Σ] for a joint covariance whose
/// first `dim_x` components belong to X. Not clamped.
double gaussian_mi_from_covariance(const Matrix& joint_cov, std::size_t dim_x);

/// Gaussian MI estimate from the 1/N sample covariance of (x, y), clamped at 0.
double estimate_gaussian_closed_form(const Matrix& x, const Matrix& y);

/// Affine maps φ_x(x) = A_x (x − m_x), φ_y(y) = A_y (y − m_y) that bring the
/// joint sample covariance to identity diagonal blocks and a diagonal cross
/// block diag(ρ).
struct CcaResult {
  Vector mean_x;
  Vector mean_y;
  Matrix map_x;          // A_x, d_x × d_x
  Matrix map_y;          // A_y, d_y × d_y
  Matrix inverse_map_x;  // A_x⁻¹
  Matrix inverse_map_y;  // A_y⁻¹
  Vector rho;            // descending, length min(d_x, d_y)

  Matrix apply_x(const Matrix& x) const;
  Matrix apply_y(const Matrix& y) const;
  // −½ Σ log(1 − ρ_j²)
  double mutual_information() const;
};

CcaResult cca_tridiagonalize(const Matrix& x, const Matrix& y);

}  // namespace mienf::estimators
