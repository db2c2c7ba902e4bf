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

#include "numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mienf::numerics {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

void require_square_symmetric(const Matrix& s, const char* who) {
  require(s.rows() == s.cols(), ErrorCode::kShapeMismatch,
          std::string(who) + ": matrix is not square");
  require(s.all_finite(), ErrorCode::kNonFinite, std::string(who) + ": non-finite entry");
  require(asymmetry(s) <= kSymmetryTolerance, ErrorCode::kInvalidArgument,
          std::string(who) + ": matrix is not symmetric");
}

// Returns false if a pivot is not positive relative to the diagonal scale.
bool try_cholesky(const Matrix& s, double shift, Matrix& lower) {
  const std::size_t n = s.rows();
  lower = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j) + shift;
    for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 1e-14 * (std::abs(s(j, j)) + shift))) return false;
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / ljj;
    }
  }
  return true;
}

void sort_eigen_descending(Vector& values, Matrix& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  Vector sorted(n);
  Matrix q(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted[k] = values[order[k]];
    for (std::size_t r = 0; r < n; ++r) q(r, k) = vectors(r, order[k]);
  }
  values = std::move(sorted);
  vectors = std::move(q);
}

// Orthonormalizes the first `filled` columns of q (two MGS passes) and
// completes the remaining columns from the standard basis.
void complete_orthonormal_basis(Matrix& q, std::size_t filled) {
  const std::size_t m = q.rows();
  auto orthogonalize = [&](std::size_t col, std::size_t against) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < against; ++k) {
        double dot = 0.0;
        for (std::size_t r = 0; r < m; ++r) dot += q(r, k) * q(r, col);
        for (std::size_t r = 0; r < m; ++r) q(r, col) -= dot * q(r, k);
      }
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < m; ++r) norm += q(r, col) * q(r, col);
    return std::sqrt(norm);
  };
  for (std::size_t col = 0; col < filled; ++col) {
    const double norm = orthogonalize(col, col);
    for (std::size_t r = 0; r < m; ++r) q(r, col) /= norm;
  }
  std::size_t basis = 0;
  for (std::size_t col = filled; col < m; ++col) {
    for (;;) {
      require(basis < m, ErrorCode::kInternal, "svd: basis completion failed");
      for (std::size_t r = 0; r < m; ++r) q(r, col) = (r == basis) ? 1.0 : 0.0;
      ++basis;
      const double norm = orthogonalize(col, col);
      if (norm > 1e-6) {
        for (std::size_t r = 0; r < m; ++r) q(r, col) /= norm;
        break;
      }
    }
  }
}

}  // namespace

CholeskyResult cholesky_logdet(const Matrix& s, double ridge_scale) {
  require_square_symmetric(s, "cholesky_logdet");
  const std::size_t n = s.rows();
  CholeskyResult result;
  if (!try_cholesky(s, 0.0, result.lower)) {
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += s(i, i);
    const double ridge = ridge_scale * trace / static_cast<double>(n);
    if (!(ridge > 0.0) || !try_cholesky(s, ridge, result.lower)) {
      raise(ErrorCode::kNotPositiveDefinite,
            "cholesky_logdet: matrix is not positive definite");
    }
    result.ridge = ridge;
  }
  for (std::size_t i = 0; i < n; ++i) result.logdet += 2.0 * std::log(result.lower(i, i));
  return result;
}

Matrix cholesky_solve(const Matrix& lower, const Matrix& b) {
  const std::size_t n = lower.rows();
  require(b.rows() == n, ErrorCode::kShapeMismatch, "cholesky_solve: size mismatch");
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = x(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= lower(i, k) * x(k, c);
      x(i, c) = v / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double v = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) v -= lower(k, ii) * x(k, c);
      x(ii, c) = v / lower(ii, ii);
    }
  }
  return x;
}

Matrix spd_inverse(const Matrix& s) {
  const auto chol = cholesky_logdet(s);
  Matrix inv = cholesky_solve(chol.lower, Matrix::identity(s.rows()));
  for (std::size_t i = 0; i < inv.rows(); ++i)
    for (std::size_t j = i + 1; j < inv.cols(); ++j)
      inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
  return inv;
}

SymmetricEigen sym_eigen(const Matrix& s, int max_sweeps) {
  require_square_symmetric(s, "sym_eigen");
  const std::size_t n = s.rows();
  Matrix a = s;
  Matrix q = Matrix::identity(n);
  const double threshold = 1e-12 * s.frobenius_norm();

  auto off_diagonal_norm = [&] {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(off);
  };

  int sweep = 0;
  while (off_diagonal_norm() > threshold) {
    if (++sweep > max_sweeps) raise(ErrorCode::kNoConvergence, "sym_eigen: Jacobi did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akr = a(k, r);
          a(k, p) = c * akp - sn * akr;
          a(k, r) = sn * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double ark = a(r, k);
          a(p, k) = c * apk - sn * ark;
          a(r, k) = sn * apk + c * ark;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - sn * qkr;
          q(k, r) = sn * qkp + c * qkr;
        }
      }
    }
  }

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
  out.eigenvectors = std::move(q);
  sort_eigen_descending(out.eigenvalues, out.eigenvectors);
  return out;
}

SvdResult svd(const Matrix& c) {
  require(c.all_finite(), ErrorCode::kNonFinite, "svd: non-finite entry");
  if (c.rows() < c.cols()) {
    SvdResult t = svd(c.transpose());
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }
  const std::size_t m = c.rows();
  const std::size_t n = c.cols();
  Matrix gram = c.transpose() * c;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) gram(i, j) = gram(j, i) = 0.5 * (gram(i, j) + gram(j, i));
  SymmetricEigen eig = sym_eigen(gram);

  SvdResult out;
  out.v = std::move(eig.eigenvectors);
  out.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.sigma[i] = std::sqrt(std::max(eig.eigenvalues[i], 0.0));

  const double sigma_max = n ? out.sigma[0] : 0.0;
  out.u = Matrix(m, m);
  std::size_t filled = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.sigma[i] > 1e-13 * sigma_max)) break;
    for (std::size_t r = 0; r < m; ++r) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) v += c(r, k) * out.v(k, i);
      out.u(r, i) = v / out.sigma[i];
    }
    ++filled;
  }
  for (std::size_t i = filled; i < n; ++i) out.sigma[i] = 0.0;
  complete_orthonormal_basis(out.u, filled);
  return out;
}

namespace {

Matrix spd_power(const Matrix& s, double power) {
  const SymmetricEigen eig = sym_eigen(s);
  const std::size_t n = s.rows();
  for (double l : eig.eigenvalues)
    require(l > 0.0, ErrorCode::kNotPositiveDefinite, "spd_power: non-positive eigenvalue");
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = std::pow(eig.eigenvalues[k], power);
    for (std::size_t i = 0; i < n; ++i) {
      const double qik = eig.eigenvectors(i, k) * w;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += qik * eig.eigenvectors(j, k);
    }
  }
  return out;
}

}  // namespace

Matrix spd_sqrt(const Matrix& s) { return spd_power(s, 0.5); }

Matrix spd_inverse_sqrt(const Matrix& s) { return spd_power(s, -0.5); }

double log_determinant_spd(const Matrix& s) { return cholesky_logdet(s).logdet; }

}  // namespace mienf::numerics
