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

#include "base/full_gaussian.hpp"

#include <cmath>
#include <string>

#include "numerics/linalg.hpp"
#include "numerics/special.hpp"

namespace mienf::base {

FullGaussianBase::FullGaussianBase(std::size_t dim, double ema_gamma)
    : mean_(dim, 0.0), cov_(Matrix::identity(dim)), gamma_(ema_gamma) {
  require(ema_gamma > 0.0 && ema_gamma <= 1.0, ErrorCode::kInvalidArgument,
          "FullGaussianBase: EMA coefficient must lie in (0, 1]");
}

FullGaussianBase::FullGaussianBase(Vector mean, Matrix covariance, double ema_gamma)
    : mean_(std::move(mean)), cov_(std::move(covariance)), gamma_(ema_gamma), primed_(true) {
  require(cov_.rows() == mean_.size() && cov_.cols() == mean_.size(), ErrorCode::kShapeMismatch,
          "FullGaussianBase: covariance shape differs from mean");
  require(ema_gamma > 0.0 && ema_gamma <= 1.0, ErrorCode::kInvalidArgument,
          "FullGaussianBase: EMA coefficient must lie in (0, 1]");
}

void FullGaussianBase::update(const Matrix& batch, MomentUpdate mode) {
  require(batch.rows() > 0, ErrorCode::kInsufficientSamples, "full_gaussian_update: empty batch");
  require(batch.cols() == dim(), ErrorCode::kShapeMismatch, "full_gaussian_update: width mismatch");
  Vector m = numerics::column_means(batch);
  Matrix c = numerics::covariance(batch);
  if (mode == MomentUpdate::kExact || !primed_) {
    mean_ = std::move(m);
    cov_ = std::move(c);
    primed_ = true;
    return;
  }
  for (std::size_t i = 0; i < dim(); ++i) mean_[i] = (1.0 - gamma_) * mean_[i] + gamma_ * m[i];
  for (std::size_t i = 0; i < cov_.size(); ++i)
    cov_.data()[i] = (1.0 - gamma_) * cov_.data()[i] + gamma_ * c.data()[i];
}

FullGaussianBase::LogLikelihood FullGaussianBase::loglik(const Matrix& batch) const {
  require(batch.cols() == dim(), ErrorCode::kShapeMismatch, "full_gaussian_loglik: width mismatch");
  const auto chol = numerics::cholesky_logdet(cov_);
  const double constant = -0.5 * (static_cast<double>(dim()) * numerics::kLog2Pi + chol.logdet);
  LogLikelihood out;
  out.per_sample.resize(batch.rows());
  Vector v(dim());
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto z = batch.row(r);
    // Forward substitution L v = z - m; quadratic form is |v|².
    double sq = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = z[i] - mean_[i];
      for (std::size_t k = 0; k < i; ++k) s -= chol.lower(i, k) * v[k];
      v[i] = s / chol.lower(i, i);
      sq += v[i] * v[i];
    }
    out.per_sample[r] = constant - 0.5 * sq;
    out.total += out.per_sample[r];
  }
  require(std::isfinite(out.total), ErrorCode::kNonFinite, "full_gaussian_loglik: non-finite log-likelihood");
  return out;
}

Matrix FullGaussianBase::loglik_grad(const Matrix& batch, std::span<const double> upstream) const {
  require(batch.cols() == dim(), ErrorCode::kShapeMismatch, "full_gaussian_loglik_grad: width mismatch");
  require(upstream.size() == batch.rows(), ErrorCode::kShapeMismatch,
          "full_gaussian_loglik_grad: upstream length differs from batch size");
  const Matrix precision = numerics::spd_inverse(cov_);
  Matrix centered = batch;
  for (std::size_t r = 0; r < centered.rows(); ++r) {
    auto row = centered.row(r);
    for (std::size_t c = 0; c < dim(); ++c) row[c] -= mean_[c];
  }
  numerics::EigenRowMatrix g = -(centered.map() * precision.map());
  for (std::size_t r = 0; r < batch.rows(); ++r) g.row(static_cast<Eigen::Index>(r)) *= upstream[r];
  return Matrix::from_eigen(g);
}

}  // namespace mienf::base
