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

#include "numerics/matrix.hpp"

namespace mienf::estimators {

struct KsgOptions {
  std::size_t k = 3;
  // Ties are broken by uniform noise of this magnitude times each column's
  // scale; 0 disables jitter.
  double jitter = 1e-10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Kraskov–Stögbauer–Grassberger estimator (first variant, max-norm):
/// ψ(k) + ψ(n) − ⟨ψ(n_x + 1) + ψ(n_y + 1)⟩. Not clamped.
double estimate_ksg(const numerics::Matrix& x, const numerics::Matrix& y, const KsgOptions& options = {});

}  // namespace mienf::estimators
