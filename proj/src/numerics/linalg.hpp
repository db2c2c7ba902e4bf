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

namespace mienf::numerics {

struct CholeskyResult {
  Matrix lower;
  double logdet = 0.0;
  // Diagonal ridge that was added before factorization (0 when none was needed).
  double ridge = 0.0;
};

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// The plain factorization is tried first. If a pivot is not safely positive,
/// the factorization is retried on S + λI with λ = ridge_scale · trace(S)/dim.
/// Throws NotPositiveDefinite if that fails too.
CholeskyResult cholesky_logdet(const Matrix& s, double ridge_scale = 1e-9);

// Solves L Lᵀ x = b for every column of b.
Matrix cholesky_solve(const Matrix& lower, const Matrix& b);
Matrix spd_inverse(const Matrix& s);

struct SymmetricEigen {
  Vector eigenvalues;  // descending
  Matrix eigenvectors;  // columns are eigenvectors
};

// Cyclic Jacobi; throws NoConvergence after max_sweeps.
SymmetricEigen sym_eigen(const Matrix& s, int max_sweeps = 100);

struct SvdResult {
  Matrix u;      // rows(C) x rows(C), orthogonal
  Vector sigma;  // min(rows, cols), nonnegative, descending
  Matrix v;      // cols(C) x cols(C), orthogonal
};

SvdResult svd(const Matrix& c);

// Symmetric square roots S^(1/2) and S^(-1/2) of a positive-definite S.
Matrix spd_sqrt(const Matrix& s);
Matrix spd_inverse_sqrt(const Matrix& s);

double log_determinant_spd(const Matrix& s);

}  // namespace mienf::numerics
