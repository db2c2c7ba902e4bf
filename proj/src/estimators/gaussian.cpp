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

#include "estimators/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numerics/linalg.hpp"

namespace mienf::estimators {

namespace {

void check_pair(const Matrix& x, const Matrix& y, const char* who) {
  require(x.rows() == y.rows(), ErrorCode::kShapeMismatch,
          std::string(who) + ": x and y have different sample counts");
  require(x.cols() > 0 && y.cols() > 0, ErrorCode::kInvalidArgument,
          std::string(who) + ": empty component");
  require(x.rows() >= x.cols() + y.cols() + 2, ErrorCode::kInsufficientSamples,
          std::string(who) + ": need at least d + 2 samples");
}

Matrix apply_affine(const Matrix& data, const Vector& mean, const Matrix& map) {
  Matrix centered = data;
  for (std::size_t r = 0; r < centered.rows(); ++r) {
    auto row = centered.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] -= mean[c];
  }
  numerics::EigenRowMatrix out = centered.map() * map.map().transpose();
  return Matrix::from_eigen(out);
}

}  // namespace

double gaussian_mi_from_covariance(const Matrix& joint_cov, std::size_t dim_x) {
  const std::size_t d = joint_cov.rows();
  require(dim_x > 0 && dim_x < d, ErrorCode::kInvalidArgument,
          "gaussian_mi_from_covariance: dim_x must split the joint dimension");
  const double joint = numerics::cholesky_logdet(joint_cov).logdet;
  const double lx = numerics::cholesky_logdet(joint_cov.block(0, 0, dim_x, dim_x)).logdet;
  const double ly = numerics::cholesky_logdet(joint_cov.block(dim_x, dim_x, d - dim_x, d - dim_x)).logdet;
  return 0.5 * (lx + ly - joint);
}

double estimate_gaussian_closed_form(const Matrix& x, const Matrix& y) {
  check_pair(x, y, "estimate_gaussian_closed_form");
  const Matrix cov = numerics::covariance(numerics::hconcat(x, y));
  return std::max(0.0, gaussian_mi_from_covariance(cov, x.cols()));
}

Matrix CcaResult::apply_x(const Matrix& x) const { return apply_affine(x, mean_x, map_x); }

Matrix CcaResult::apply_y(const Matrix& y) const { return apply_affine(y, mean_y, map_y); }

double CcaResult::mutual_information() const {
  double total = 0.0;
  for (double r : rho) total -= 0.5 * std::log1p(-r * r);
  return total;
}

CcaResult cca_tridiagonalize(const Matrix& x, const Matrix& y) {
  check_pair(x, y, "cca_tridiagonalize");
  const std::size_t dx = x.cols();
  const std::size_t dy = y.cols();
  const Matrix joint = numerics::hconcat(x, y);
  const Vector mean = numerics::column_means(joint);
  const Matrix cov = numerics::covariance(joint);
  // Positive-definiteness check with the same ridge policy as the estimator.
  numerics::cholesky_logdet(cov);

  const Matrix sxx = cov.block(0, 0, dx, dx);
  const Matrix syy = cov.block(dx, dx, dy, dy);
  const Matrix sxy = cov.block(0, dx, dx, dy);
  const Matrix wx = numerics::spd_inverse_sqrt(sxx);
  const Matrix wy = numerics::spd_inverse_sqrt(syy);
  const numerics::SvdResult svd = numerics::svd(wx * sxy * wy);

  CcaResult out;
  out.mean_x.assign(mean.begin(), mean.begin() + static_cast<std::ptrdiff_t>(dx));
  out.mean_y.assign(mean.begin() + static_cast<std::ptrdiff_t>(dx), mean.end());
  out.map_x = svd.u.transpose() * wx;
  out.map_y = svd.v.transpose() * wy;
  out.inverse_map_x = numerics::spd_sqrt(sxx) * svd.u;
  out.inverse_map_y = numerics::spd_sqrt(syy) * svd.v;
  out.rho = svd.sigma;
  for (double& r : out.rho) r = std::clamp(r, 0.0, std::nextafter(1.0, 0.0));
  return out;
}

}  // namespace mienf::estimators
