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

// Independent reference computations for the unit tests. Everything here is
// written with plain loops and the C++ standard library only; none of it
// calls into mienf_core.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense out = zeros(a.size(), b.front().size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b.front().size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Dense transpose(const Dense& a) {
  Dense out = zeros(a.front().size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.front().size(); ++j) out[j][i] = a[i][j];
  return out;
}

// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Dense a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0.0) return 0.0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// Inverse by Gauss-Jordan.
inline Dense inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// log N(z; mean, cov) through the explicit inverse and determinant.
inline double gaussian_log_density(const std::vector<double>& z, const std::vector<double>& mean,
                                   const Dense& cov) {
  const std::size_t d = z.size();
  const Dense inv = inverse(cov);
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) quad += (z[i] - mean[i]) * inv[i][j] * (z[j] - mean[j]);
  return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + std::log(determinant(cov)) + quad);
}

// Gaussian MI from a joint covariance with the first dx components in X.
inline double gaussian_mi(const Dense& cov, std::size_t dx) {
  const std::size_t d = cov.size();
  Dense sx = zeros(dx, dx), sy = zeros(d - dx, d - dx);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i < dx && j < dx) sx[i][j] = cov[i][j];
      if (i >= dx && j >= dx) sy[i - dx][j - dx] = cov[i][j];
    }
  return 0.5 * (std::log(determinant(sx)) + std::log(determinant(sy)) - std::log(determinant(cov)));
}

// Symmetric central-difference derivative of lgamma.
inline double digamma(double x) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Principal Lambert W on [-1/e, inf) by bisection on w e^w = t.
inline double lambert_w0(double t) {
  double lo = -1.0, hi = std::max(1.0, std::log1p(std::max(t, 0.0)) + 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < t) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double student_f(double x) { return std::lgamma(0.5 * x) - 0.5 * x * digamma(0.5 * x); }

inline double student_correction(double k, double dx, double dy) {
  return student_f(k) + student_f(k + dx + dy) - student_f(k + dx) - student_f(k + dy);
}

// Smoothed uniform MI by direct quadrature of −∫ p_Y log p_Y − log(2ε).
inline double smoothed_uniform_mi(double eps) {
  const double lo = -eps, hi = 1.0 + eps;
  const int steps = 200000;
  const double h = (hi - lo) / steps;
  double hy = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double y = lo + (i + 0.5) * h;
    const double len = std::min(1.0, y + eps) - std::max(0.0, y - eps);
    const double p = len / (2.0 * eps);
    if (p > 0.0) hy -= p * std::log(p) * h;
  }
  return hy - std::log(2.0 * eps);
}

// Leaky-ReLU MLP forward with weights stored (fan_in x fan_out) then bias.
inline std::vector<double> mlp_forward(const std::vector<std::size_t>& widths, const std::vector<double>& params,
                                       std::vector<double> x, double slope) {
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    std::vector<double> y(out, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
      double s = params[off + in * out + j];
      for (std::size_t i = 0; i < in; ++i) s += x[i] * params[off + i * out + j];
      y[j] = s;
    }
    off += in * out + out;
    if (l + 2 < widths.size())
      for (double& v : y) v = v > 0.0 ? v : slope * v;
    x = std::move(y);
  }
  return x;
}

// Numerical Jacobian of f: R^d → R^d by central differences.
inline Dense jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                      const std::vector<double>& x, double h = 1e-6) {
  const std::size_t d = x.size();
  Dense j = zeros(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    auto xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const auto fp = f(xp), fm = f(xm);
    for (std::size_t r = 0; r < d; ++r) j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

// Central-difference gradient of a scalar function of a parameter vector.
inline std::vector<double> gradient(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& p, double h = 1e-5) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    g[i] = (f(pp) - f(pm)) / (2.0 * h);
  }
  return g;
}

// Max over entries of |a − b| / max(1, |a|, |b|).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// KSG (first variant, max-norm) by direct double loops, without tie jitter.
inline double ksg(const Dense& x, const Dense& y, std::size_t k) {
  const std::size_t n = x.size();
  auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> joint;
    joint.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) joint.push_back(std::max(dist(x[i], x[j]), dist(y[i], y[j])));
    std::nth_element(joint.begin(), joint.begin() + static_cast<std::ptrdiff_t>(k - 1), joint.end());
    const double eps = joint[k - 1];
    std::size_t nx = 0, ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (dist(x[i], x[j]) < eps) ++nx;
      if (dist(y[i], y[j]) < eps) ++ny;
    }
    acc += digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
  }
  return digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) - acc / static_cast<double>(n);
}

// One-sample Kolmogorov-Smirnov p-value against a continuous CDF
// (asymptotic Kolmogorov distribution with the Stephens correction).
inline double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0.0;
  for (int k = 1; k < 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace oracle
