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

#include "nn/adam.hpp"

#include <cmath>

#include "common/error.hpp"

namespace mienf::nn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate) {
  require(params.size() == grads.size() && params.size() == state.first.size() &&
              params.size() == state.second.size(),
          ErrorCode::kShapeMismatch, "adam_step: parameter, gradient and moment sizes differ");
  const auto& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(h.beta1, t);
  const double correction2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.first[i] = h.beta1 * state.first[i] + (1.0 - h.beta1) * g;
    state.second[i] = h.beta2 * state.second[i] + (1.0 - h.beta2) * g * g;
    const double m_hat = state.first[i] / correction1;
    const double v_hat = state.second[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
}

}  // namespace mienf::nn
