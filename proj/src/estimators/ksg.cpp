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

#include "estimators/ksg.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "common/rng.hpp"
#include "numerics/special.hpp"

namespace mienf::estimators {

namespace {

using numerics::Matrix;

Matrix jittered(const Matrix& m, double magnitude, Rng& rng) {
  Matrix out = m;
  if (magnitude <= 0.0) return out;
  const std::size_t n = m.rows();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += m(r, c);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) sq += (m(r, c) - mean) * (m(r, c) - mean);
    double scale = std::sqrt(sq / static_cast<double>(n));
    if (!(scale > 0.0)) scale = 1.0;
    std::uniform_real_distribution<double> noise(-magnitude * scale, magnitude * scale);
    for (std::size_t r = 0; r < n; ++r) out(r, c) += noise(rng);
  }
  return out;
}

double max_norm(const double* a, const double* b, std::size_t d) {
  double m = 0.0;
  for (std::size_t c = 0; c < d; ++c) m = std::max(m, std::abs(a[c] - b[c]));
  return m;
}

}  // namespace

double estimate_ksg(const Matrix& x, const Matrix& y, const KsgOptions& options) {
  require(x.rows() == y.rows(), ErrorCode::kShapeMismatch, "estimate_ksg: x and y have different sample counts");
  require(x.cols() > 0 && y.cols() > 0, ErrorCode::kInvalidArgument, "estimate_ksg: empty component");
  require(options.k >= 1, ErrorCode::kInvalidArgument, "estimate_ksg: k must be at least 1");
  const std::size_t n = x.rows();
  require(n > options.k, ErrorCode::kInsufficientSamples, "estimate_ksg: need more than k samples");
  require(x.all_finite() && y.all_finite(), ErrorCode::kNonFinite, "estimate_ksg: non-finite input");

  Rng rng = make_rng(options.seed, streams::kJitter);
  const Matrix xs = jittered(x, options.jitter, rng);
  const Matrix ys = jittered(y, options.jitter, rng);
  const std::size_t dx = x.cols();
  const std::size_t dy = y.cols();
  const std::size_t k = options.k;

  // Per-point ψ(n_x + 1) + ψ(n_y + 1), summed afterwards in index order.
  std::vector<double> terms(n);
  auto work = [&](std::size_t first, std::size_t last) {
    std::vector<double> ex(n), ey(n), joint(n);
    for (std::size_t i = first; i < last; ++i) {
      const double* xi = xs.row(i).data();
      const double* yi = ys.row(i).data();
      for (std::size_t j = 0; j < n; ++j) {
        ex[j] = max_norm(xi, xs.row(j).data(), dx);
        ey[j] = max_norm(yi, ys.row(j).data(), dy);
        joint[j] = std::max(ex[j], ey[j]);
      }
      // The point itself sits at distance 0, so the k-th neighbour is index k.
      std::nth_element(joint.begin(), joint.begin() + static_cast<std::ptrdiff_t>(k), joint.end());
      const double eps = joint[k];
      std::size_t nx = 0, ny = 0;
      for (std::size_t j = 0; j < n; ++j) {
        nx += ex[j] < eps;
        ny += ey[j] < eps;
      }
      // Both counts include the point itself, so ψ(n_x + 1) = ψ(nx).
      terms[i] = numerics::digamma(static_cast<double>(nx)) + numerics::digamma(static_cast<double>(ny));
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, n);
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(work, n * t / threads, n * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }
  double mean_terms = 0.0;
  for (double v : terms) mean_terms += v;
  mean_terms /= static_cast<double>(n);
  return numerics::digamma(static_cast<double>(k)) + numerics::digamma(static_cast<double>(n)) - mean_terms;
}

}  // namespace mienf::estimators
