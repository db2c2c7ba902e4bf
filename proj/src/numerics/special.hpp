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

namespace mienf::numerics {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLog2Pi = 1.837877066409345483560659472811235279;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
inline constexpr double kInvE = 0.367879441171442321595523770161460867;

// log Γ(x) for x > 0; DomainError otherwise.
double log_gamma(double x);
// ψ(x) = d/dx log Γ(x) for x > 0; DomainError otherwise.
double digamma(double x);

double std_normal_cdf(double x) noexcept;
double std_normal_log_pdf(double x) noexcept;
// Φ⁻¹(p) for p in (0, 1); DomainError otherwise.
double std_normal_quantile(double p);

// Principal branch W₀(t) for t in [-1/e, 0); DomainError otherwise.
double lambert_w0(double t);

}  // namespace mienf::numerics
