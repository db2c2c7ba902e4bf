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

#include <cmath>
#include <span>

#include "common/rng.hpp"
#include "numerics/matrix.hpp"

namespace mienf::base {

using numerics::Matrix;
using numerics::Vector;

inline constexpr double kMinLogMi = -30.0;
inline const double kMaxLogMi = std::log(50.0);
inline const double kDefaultLogMi = std::log(0.01);

/// Correlation implied by a per-pair log-MI value w: ρ = sqrt(1 - exp(-2 e^w)).
double correlation_from_log_mi(double w) noexcept;
/// Inverse of the above: w = log(-½ log(1 - ρ²)).
double log_mi_from_correlation(double rho) noexcept;

/// Σ^(-1/2) of a tridiagonal Gaussian, stored as per-pair coefficients.
/// Pair j mixes latent components j and d_ξ + j with the 2x2 block
/// [[α+β, α-β], [α-β, α+β]]; unpaired components pass through unchanged.
struct SparseWhitener {
  std::size_t dim_x = 0;
  std::size_t dim_y = 0;
  Vector alpha;
  Vector beta;

  void apply(std::span<const double> z, std::span<double> out) const;
  Matrix dense() const;
};

/// Zero-mean Gaussian with identity marginal blocks and diagonal cross block
/// diag(ρ_j), parametrized by w_j = log of the per-pair MI.
class TridiagGaussianBase {
 public:
  TridiagGaussianBase() = default;
  TridiagGaussianBase(std::size_t dim_x, std::size_t dim_y);  // w_j = log 0.01
  TridiagGaussianBase(std::size_t dim_x, std::size_t dim_y, Vector w);

  std::size_t dim_x() const noexcept { return dim_x_; }
  std::size_t dim_y() const noexcept { return dim_y_; }
  std::size_t dim() const noexcept { return dim_x_ + dim_y_; }
  std::size_t paired() const noexcept { return w_.size(); }

  const Vector& w() const noexcept { return w_; }
  Vector& mutable_w() noexcept { return w_; }
  void clamp_w() noexcept;

  Vector correlations() const;
  SparseWhitener whitener() const;
  Matrix dense_covariance() const;

  // Σ_j e^{w_j}.
  double mutual_information() const noexcept;

  struct LogLikelihood {
    double total = 0.0;
    Vector per_sample;
  };
  // `latent` is n x (d_ξ + d_η) with the ξ block first.
  LogLikelihood loglik(const Matrix& latent) const;

  struct Gradient {
    Vector w;
    Matrix latent;
  };
  // Gradient of Σ_k upstream_k · loglik_k.
  Gradient loglik_grad(const Matrix& latent, std::span<const double> upstream) const;

  Matrix sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t dim_x_ = 0;
  std::size_t dim_y_ = 0;
  Vector w_;
};

}  // namespace mienf::base
