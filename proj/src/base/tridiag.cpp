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

#include "base/tridiag.hpp"

#include <algorithm>
#include <string>

#include "numerics/special.hpp"

namespace mienf::base {

namespace {

struct PairTerms {
  double mi;            // e^w
  double rho;
  double det;           // 1 - ρ²
  double one_minus_rho;
};

PairTerms pair_terms(double w) noexcept {
  PairTerms t;
  t.mi = std::exp(w);
  t.det = std::exp(-2.0 * t.mi);
  t.rho = std::sqrt(-std::expm1(-2.0 * t.mi));
  t.one_minus_rho = t.det / (1.0 + t.rho);
  return t;
}

void check_latent(const Matrix& latent, std::size_t dim, const char* who) {
  require(latent.cols() == dim, ErrorCode::kShapeMismatch,
          std::string(who) + ": latent has " + std::to_string(latent.cols()) + " columns, expected " +
              std::to_string(dim));
  require(latent.all_finite(), ErrorCode::kNonFinite, std::string(who) + ": non-finite latent");
}

}  // namespace

double correlation_from_log_mi(double w) noexcept { return std::sqrt(-std::expm1(-2.0 * std::exp(w))); }

double log_mi_from_correlation(double rho) noexcept { return std::log(-0.5 * std::log1p(-rho * rho)); }

void SparseWhitener::apply(std::span<const double> z, std::span<double> out) const {
  std::copy(z.begin(), z.end(), out.begin());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double a = z[j];
    const double b = z[dim_x + j];
    out[j] = (alpha[j] + beta[j]) * a + (alpha[j] - beta[j]) * b;
    out[dim_x + j] = (alpha[j] - beta[j]) * a + (alpha[j] + beta[j]) * b;
  }
}

Matrix SparseWhitener::dense() const {
  Matrix w = Matrix::identity(dim_x + dim_y);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    w(j, j) = w(dim_x + j, dim_x + j) = alpha[j] + beta[j];
    w(j, dim_x + j) = w(dim_x + j, j) = alpha[j] - beta[j];
  }
  return w;
}

TridiagGaussianBase::TridiagGaussianBase(std::size_t dim_x, std::size_t dim_y)
    : TridiagGaussianBase(dim_x, dim_y, Vector(std::min(dim_x, dim_y), kDefaultLogMi)) {}

TridiagGaussianBase::TridiagGaussianBase(std::size_t dim_x, std::size_t dim_y, Vector w)
    : dim_x_(dim_x), dim_y_(dim_y), w_(std::move(w)) {
  require(dim_x > 0 && dim_y > 0, ErrorCode::kInvalidArgument, "TridiagGaussianBase: empty block");
  require(w_.size() == std::min(dim_x, dim_y), ErrorCode::kShapeMismatch,
          "TridiagGaussianBase: w must have min(d_x, d_y) entries");
  for (double v : w_)
    require(std::isfinite(v), ErrorCode::kNonFinite, "TridiagGaussianBase: non-finite w");
}

void TridiagGaussianBase::clamp_w() noexcept {
  for (double& v : w_) v = std::clamp(v, kMinLogMi, kMaxLogMi);
}

Vector TridiagGaussianBase::correlations() const {
  Vector rho(w_.size());
  for (std::size_t j = 0; j < w_.size(); ++j) rho[j] = pair_terms(w_[j]).rho;
  return rho;
}

SparseWhitener TridiagGaussianBase::whitener() const {
  SparseWhitener s{dim_x_, dim_y_, Vector(w_.size()), Vector(w_.size())};
  for (std::size_t j = 0; j < w_.size(); ++j) {
    const PairTerms t = pair_terms(w_[j]);
    s.alpha[j] = 1.0 / (2.0 * std::sqrt(1.0 + t.rho));
    s.beta[j] = 1.0 / (2.0 * std::sqrt(t.one_minus_rho));
  }
  return s;
}

Matrix TridiagGaussianBase::dense_covariance() const {
  Matrix s = Matrix::identity(dim());
  const Vector rho = correlations();
  for (std::size_t j = 0; j < rho.size(); ++j) s(j, dim_x_ + j) = s(dim_x_ + j, j) = rho[j];
  return s;
}

double TridiagGaussianBase::mutual_information() const noexcept {
  double total = 0.0;
  for (double v : w_) total += std::exp(v);
  return total;
}

TridiagGaussianBase::LogLikelihood TridiagGaussianBase::loglik(const Matrix& latent) const {
  check_latent(latent, dim(), "tridiag_loglik");
  const SparseWhitener white = whitener();
  const double constant = mutual_information() - 0.5 * static_cast<double>(dim()) * numerics::kLog2Pi;
  LogLikelihood out;
  out.per_sample.resize(latent.rows());
  Vector buffer(dim());
  for (std::size_t r = 0; r < latent.rows(); ++r) {
    white.apply(latent.row(r), buffer);
    double sq = 0.0;
    for (double v : buffer) sq += v * v;
    out.per_sample[r] = constant - 0.5 * sq;
    out.total += out.per_sample[r];
  }
  require(std::isfinite(out.total), ErrorCode::kNonFinite, "tridiag_loglik: non-finite log-likelihood");
  return out;
}

TridiagGaussianBase::Gradient TridiagGaussianBase::loglik_grad(const Matrix& latent,
                                                               std::span<const double> upstream) const {
  check_latent(latent, dim(), "tridiag_loglik_grad");
  require(upstream.size() == latent.rows(), ErrorCode::kShapeMismatch,
          "tridiag_loglik_grad: upstream length differs from batch size");
  Gradient g{Vector(w_.size(), 0.0), Matrix(latent.rows(), dim())};
  std::vector<PairTerms> terms(w_.size());
  for (std::size_t j = 0; j < w_.size(); ++j) terms[j] = pair_terms(w_[j]);

  for (std::size_t r = 0; r < latent.rows(); ++r) {
    const double up = upstream[r];
    auto z = latent.row(r);
    auto gz = g.latent.row(r);
    for (std::size_t c = 0; c < dim(); ++c) gz[c] = -up * z[c];
    for (std::size_t j = 0; j < w_.size(); ++j) {
      const PairTerms& t = terms[j];
      const double a = z[j];
      const double b = z[dim_x_ + j];
      const double q = a * a - 2.0 * t.rho * a * b + b * b;
      gz[j] = -up * (a - t.rho * b) / t.det;
      gz[dim_x_ + j] = -up * (b - t.rho * a) / t.det;
      g.w[j] += up * t.mi * (1.0 + a * b / t.rho - q / t.det);
    }
  }
  for (double v : g.w) require(std::isfinite(v), ErrorCode::kNonFinite, "tridiag_loglik_grad: non-finite gradient");
  return g;
}

Matrix TridiagGaussianBase::sample(std::size_t count, Rng& rng) const {
  require(count > 0, ErrorCode::kInvalidArgument, "tridiag_sample: count must be positive");
  std::normal_distribution<double> normal;
  Matrix out(count, dim());
  std::vector<PairTerms> terms(w_.size());
  for (std::size_t j = 0; j < w_.size(); ++j) terms[j] = pair_terms(w_[j]);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < dim(); ++c) out(r, c) = normal(rng);
    for (std::size_t j = 0; j < w_.size(); ++j) {
      const double a = out(r, j);
      out(r, dim_x_ + j) = terms[j].rho * a + std::sqrt(terms[j].det) * out(r, dim_x_ + j);
    }
  }
  return out;
}

}  // namespace mienf::base
