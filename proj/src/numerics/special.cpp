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

#include "numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "common/error.hpp"

namespace mienf::numerics {

namespace {

constexpr double kShiftThreshold = 10.0;

// Stirling series for log Γ(x), x >= 10. Truncation error < 1e-17.
double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  return (x - 0.5) * std::log(x) - x + 0.5 * kLog2Pi + series;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    raise(ErrorCode::kDomainError, "log_gamma: argument must be positive, got " + std::to_string(x));
  }
  if (x >= kShiftThreshold) return log_gamma_stirling(x);
  // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
  double product = 1.0;
  double z = x;
  while (z < kShiftThreshold) {
    product *= z;
    z += 1.0;
  }
  return log_gamma_stirling(z) - std::log(product);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    raise(ErrorCode::kDomainError, "digamma: argument must be positive, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < kShiftThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double std_normal_log_pdf(double x) noexcept { return -0.5 * (kLog2Pi + x * x); }

// Wichura, Algorithm AS 241 (PPND16), then one Newton step against erfc.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    raise(ErrorCode::kDomainError, "std_normal_quantile: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  double r;
  double x;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    x = q *
        (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
             45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608) /
        (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
             21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
  } else {
    r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
    }
    if (q < 0.0) x = -x;
  }
  // One Newton step; the upper tail is used for x >= 0 so 1-p keeps precision.
  const double pdf = std::exp(std_normal_log_pdf(x));
  if (pdf > 0.0) {
    if (x < 0.0) {
      x -= (std_normal_cdf(x) - p) / pdf;
    } else {
      x += (0.5 * std::erfc(x / std::sqrt(2.0)) - (1.0 - p)) / pdf;
    }
  }
  return x;
}

double lambert_w0(double t) {
  if (!(t >= -kInvE && t < 0.0)) {
    raise(ErrorCode::kDomainError, "lambert_w0: argument must lie in [-1/e, 0)");
  }
  const double p2 = 2.0 * (std::exp(1.0) * t + 1.0);
  if (p2 <= 0.0) return -1.0;
  // Branch-point series for the lower part of the interval, log1p-based
  // start near zero; Halley iteration from either.
  double w;
  if (t < -0.25) {
    const double p = std::sqrt(p2);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    w = std::log1p(t);
    w = w * (1.0 - std::log1p(w) / (2.0 + w));
  }
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - t;
    const double wp1 = std::max(w + 1.0, 1e-300);
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w = std::max(w - step, -1.0);
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace mienf::numerics
