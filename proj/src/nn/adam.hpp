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

namespace mienf::nn {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  explicit AdamState(std::size_t parameter_count = 0, AdamHyper hyper = {})
      : first(parameter_count, 0.0), second(parameter_count, 0.0), hyper(hyper) {}

  std::uint64_t step = 0;
  std::vector<double> first;
  std::vector<double> second;
  AdamHyper hyper;
};

// One bias-corrected Adam descent step: params -= lr * m̂ / (sqrt(v̂) + ε).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate);

}  // namespace mienf::nn
