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
#include <vector>

#include "common/rng.hpp"
#include "numerics/matrix.hpp"

namespace mienf::nn {

using numerics::Matrix;
using numerics::Vector;

inline constexpr double kLeakySlope = 0.01;

/// Cached activations of one forward pass, consumed by Mlp::backward.
struct GradTape {
  const void* owner = nullptr;
  std::uint64_t generation = 0;
  std::vector<Matrix> inputs;  // input to each affine layer
  std::vector<Matrix> pre;     // pre-activation of each hidden layer
};

struct MlpGradients {
  Vector parameters;  // same layout as Mlp::parameters()
  Matrix input;
};

/// Fully connected network: affine layers with leaky-rectifier hidden
/// activations and an identity output.
///
/// Parameters live in one flat vector; layer l stores its weight matrix
/// (fan_in x fan_out, row-major) followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> widths, double leaky_slope = kLeakySlope);

  // Glorot-uniform hidden layers; the final layer is zeroed when requested.
  void initialize(Rng& rng, bool zero_final_layer = true);

  std::size_t input_width() const noexcept { return widths_.front(); }
  std::size_t output_width() const noexcept { return widths_.back(); }
  std::size_t layer_count() const noexcept { return widths_.size() - 1; }
  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  double leaky_slope() const noexcept { return slope_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<const double> parameters() const noexcept { return params_; }
  // Invalidates any outstanding tapes.
  std::span<double> mutable_parameters() noexcept {
    ++generation_;
    return params_;
  }

  struct ForwardResult {
    Matrix output;
    GradTape tape;
  };
  ForwardResult forward(const Matrix& x) const;
  Matrix predict(const Matrix& x) const;

  // Gradients of sum(upstream ⊙ output) w.r.t. parameters and input.
  MlpGradients backward(const GradTape& tape, const Matrix& upstream) const;

 private:
  std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const noexcept {
    return offsets_[layer] + widths_[layer] * widths_[layer + 1];
  }
  Matrix run(const Matrix& x, GradTape* tape) const;

  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  Vector params_;
  double slope_ = kLeakySlope;
  std::uint64_t generation_ = 0;
};

}  // namespace mienf::nn
