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
#include <string>
#include <variant>
#include <vector>

#include "flows/layers.hpp"

namespace mienf::flows {

struct FlowConfig {
  std::size_t coupling_layers = 6;
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 1;
  double scale_clamp = 5.0;
  // Elementwise monotone tanh layers placed before each coupling.
  bool elementwise = true;
  std::size_t elementwise_layers = 1;  // per coupling block
  bool standardize = true;
};

struct FlowTape {
  const void* owner = nullptr;
  std::uint64_t generation = 0;
  // Per layer: input for elementwise layers, coupling tape, or monostate.
  std::vector<std::variant<std::monostate, Matrix, AffineCoupling::Tape>> layers;
};

struct FlowGradients {
  Vector parameters;  // CompositeFlow::parameters() layout
  Matrix input;
};

/// Ordered composition of invertible layers with a tractable log-det.
class CompositeFlow {
 public:
  CompositeFlow() = default;
  CompositeFlow(std::size_t dim, std::vector<Layer> layers);

  // Default architecture; `data` fixes the standardization layer.
  static CompositeFlow make_default(const Matrix& data, const FlowConfig& config, Rng& rng);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t parameter_count() const noexcept;

  Vector parameters() const;
  // Invalidates outstanding tapes.
  void set_parameters(std::span<const double> values);

  struct ForwardResult {
    Matrix latent;
    Vector logdet;
    FlowTape tape;
  };
  // Throws NonFinite if any latent or log-det entry is NaN/Inf.
  ForwardResult forward(const Matrix& x) const;
  // Latent and log-det without a tape.
  std::pair<Matrix, Vector> transform(const Matrix& x) const;

  // Inverse map and its per-sample log-det.
  std::pair<Matrix, Vector> inverse_with_logdet(const Matrix& z) const;
  Matrix inverse(const Matrix& z) const { return inverse_with_logdet(z).first; }

  FlowGradients backward(const FlowTape& tape, const Matrix& upstream_latent,
                         std::span<const double> upstream_logdet) const;

 private:
  ForwardResult run(const Matrix& x, bool record) const;

  std::size_t dim_ = 0;
  std::vector<Layer> layers_;
  std::uint64_t generation_ = 0;
};

/// f = f_X × f_Y acting blockwise on (x, y).
struct ProductFlow {
  CompositeFlow fx;
  CompositeFlow fy;

  struct ForwardResult {
    CompositeFlow::ForwardResult x;
    CompositeFlow::ForwardResult y;
    Vector logdet;  // logdet_x + logdet_y
  };
  ForwardResult forward(const Matrix& x, const Matrix& y) const;
};

}  // namespace mienf::flows
