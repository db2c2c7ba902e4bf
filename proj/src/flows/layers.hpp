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

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "common/rng.hpp"
#include "nn/mlp.hpp"
#include "numerics/matrix.hpp"

namespace mienf::flows {

using numerics::Matrix;
using numerics::Vector;

/// Upstream/downstream gradients of one layer. `parameters` follows the
/// layer's own parameter layout.
struct LayerGradients {
  Vector parameters;
  Matrix input;
};

/// Fixed (non-learnable) per-component standardization y = (x - mean) / scale.
/// A negative scale flips the orientation of that component.
class Standardize {
 public:
  Standardize() = default;
  Standardize(Vector mean, Vector scale);
  static Standardize fit(const Matrix& data);

  std::size_t dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Vector& scale() const noexcept { return scale_; }
  std::size_t parameter_count() const noexcept { return 0; }
  void flip(std::size_t component);

  void forward(Matrix& x, Vector& logdet) const;
  void inverse(Matrix& y, Vector& logdet) const;

 private:
  Vector mean_;
  Vector scale_;
};

/// Fixed (non-learnable) full affine map y = A (x - mean).
class FixedAffine {
 public:
  FixedAffine() = default;
  FixedAffine(Vector mean, Matrix map, Matrix inverse_map);

  std::size_t dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& map() const noexcept { return map_; }
  const Matrix& inverse_map() const noexcept { return inverse_map_; }
  double logdet() const noexcept { return logdet_; }
  std::size_t parameter_count() const noexcept { return 0; }

  void forward(Matrix& x, Vector& logdet) const;
  void inverse(Matrix& y, Vector& logdet) const;
  Matrix backward(const Matrix& upstream) const;

 private:
  Vector mean_;
  Matrix map_;
  Matrix inverse_map_;
  double logdet_ = 0.0;
};

/// Learnable diagonal affine map y = x ⊙ exp(log_scale) + shift.
/// Parameters: [log_scale..., shift...].
class DiagonalAffine {
 public:
  DiagonalAffine() = default;
  explicit DiagonalAffine(std::size_t dim);
  DiagonalAffine(Vector log_scale, Vector shift);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> mutable_parameters() noexcept { return params_; }

  void forward(Matrix& x, Vector& logdet) const;
  void inverse(Matrix& y, Vector& logdet) const;
  // `input` is the layer input recorded at forward time.
  LayerGradients backward(const Matrix& input, const Matrix& upstream,
                          std::span<const double> upstream_logdet) const;

 private:
  std::size_t dim_ = 0;
  Vector params_;
};

/// Elementwise monotone map y = x + (u / b) tanh(b x + c) with
/// u = exp(eta) - 0.99 and b = exp(beta), so dy/dx = 1 + u sech²(b x + c) > 0.
/// Parameters: [eta..., beta..., c...]; initialized to the identity.
class TanhResidual {
 public:
  static constexpr double kMinSlope = 0.99;

  TanhResidual() = default;
  explicit TanhResidual(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> mutable_parameters() noexcept { return params_; }

  void forward(Matrix& x, Vector& logdet) const;
  void inverse(Matrix& y, Vector& logdet) const;
  LayerGradients backward(const Matrix& input, const Matrix& upstream,
                          std::span<const double> upstream_logdet) const;

 private:
  std::size_t dim_ = 0;
  Vector params_;
};

/// Real NVP affine coupling. The first `split` components pass through and
/// condition a single MLP that emits raw scales and shifts for the rest:
///   s = s_max tanh(raw / s_max),  y₂ = x₂ ⊙ exp(s) + t.
class AffineCoupling {
 public:
  struct Tape {
    Matrix input;
    Matrix scale;      // effective s
    Matrix tanh_raw;   // tanh(raw / s_max)
    nn::GradTape conditioner;
  };

  AffineCoupling() = default;
  AffineCoupling(std::size_t dim, std::size_t split, std::vector<std::size_t> hidden,
                 double scale_clamp);
  AffineCoupling(std::size_t dim, std::size_t split, nn::Mlp conditioner, double scale_clamp);

  void initialize(Rng& rng) { conditioner_.initialize(rng, true); }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t split() const noexcept { return split_; }
  double scale_clamp() const noexcept { return scale_clamp_; }
  const nn::Mlp& conditioner() const noexcept { return conditioner_; }
  std::size_t parameter_count() const noexcept { return conditioner_.parameter_count(); }
  std::span<const double> parameters() const noexcept { return conditioner_.parameters(); }
  std::span<double> mutable_parameters() noexcept { return conditioner_.mutable_parameters(); }

  void forward(Matrix& x, Vector& logdet, Tape* tape) const;
  void inverse(Matrix& y, Vector& logdet) const;
  LayerGradients backward(const Tape& tape, const Matrix& upstream,
                          std::span<const double> upstream_logdet) const;

 private:
  std::size_t dim_ = 0;
  std::size_t split_ = 0;
  double scale_clamp_ = 5.0;
  nn::Mlp conditioner_;
};

/// Rotation y = (x[shift:], x[:shift]); with shift = split this swaps the
/// passive and active halves of a coupling.
class Swap {
 public:
  Swap() = default;
  Swap(std::size_t dim, std::size_t shift) : dim_(dim), shift_(shift) {}
  std::size_t dim() const noexcept { return dim_; }
  std::size_t shift() const noexcept { return shift_; }
  std::size_t parameter_count() const noexcept { return 0; }

  void forward(Matrix& x) const;
  void inverse(Matrix& y) const;
  Matrix backward(const Matrix& upstream) const;

 private:
  std::size_t dim_ = 0;
  std::size_t shift_ = 0;
};

using Layer =
    std::variant<Standardize, FixedAffine, DiagonalAffine, TanhResidual, AffineCoupling, Swap>;

}  // namespace mienf::flows
