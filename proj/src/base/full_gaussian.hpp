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

#include <span>

#include "numerics/matrix.hpp"

namespace mienf::base {

using numerics::Matrix;
using numerics::Vector;

enum class MomentUpdate { kExact, kEma };

/// Unrestricted Gaussian whose mean and covariance track the latent
/// samples, either exactly (batch ML estimates) or by exponential moving
/// average with coefficient γ. A base built from its dimension alone adopts
/// the moments of the first batch it sees in either mode.
class FullGaussianBase {
 public:
  FullGaussianBase() = default;
  explicit FullGaussianBase(std::size_t dim, double ema_gamma = 0.1);
  FullGaussianBase(Vector mean, Matrix covariance, double ema_gamma = 0.1);

  std::size_t dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return cov_; }
  double ema_gamma() const noexcept { return gamma_; }
  bool primed() const noexcept { return primed_; }

  void update(const Matrix& batch, MomentUpdate mode);

  struct LogLikelihood {
    double total = 0.0;
    Vector per_sample;
  };
  LogLikelihood loglik(const Matrix& batch) const;
  // ∂ loglik_k / ∂ z_k = -Σ⁻¹ (z_k - m), scaled by upstream_k.
  Matrix loglik_grad(const Matrix& batch, std::span<const double> upstream) const;

 private:
  Vector mean_;
  Matrix cov_;
  double gamma_ = 0.1;
  bool primed_ = false;
};

}  // namespace mienf::base
