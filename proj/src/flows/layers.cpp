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

#include "flows/layers.hpp"

#include "numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mienf::flows {

namespace {

void check_width(const Matrix& x, std::size_t dim, const char* who) {
  require(x.cols() == dim, ErrorCode::kShapeMismatch,
          std::string(who) + ": batch has " + std::to_string(x.cols()) +
              " columns, layer expects " + std::to_string(dim));
}

}  // namespace

// ---------------------------------------------------------------- Standardize

Standardize::Standardize(Vector mean, Vector scale) : mean_(std::move(mean)), scale_(std::move(scale)) {
  require(mean_.size() == scale_.size(), ErrorCode::kShapeMismatch, "Standardize: size mismatch");
  for (double s : scale_)
    require(s != 0.0 && std::isfinite(s), ErrorCode::kInvalidArgument,
            "Standardize: scales must be finite and nonzero");
}

Standardize Standardize::fit(const Matrix& data) {
  Vector mean = numerics::column_means(data);
  Vector scale(data.cols(), 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto row = data.row(r);
    for (std::size_t c = 0; c < data.cols(); ++c) scale[c] += (row[c] - mean[c]) * (row[c] - mean[c]);
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(data.rows()));
    if (!(s > 0.0)) s = 1.0;  // constant column
  }
  return {std::move(mean), std::move(scale)};
}

void Standardize::forward(Matrix& x, Vector& logdet) const {
  check_width(x, dim(), "Standardize");
  double shift = 0.0;
  for (double s : scale_) shift -= std::log(std::abs(s));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean_[c]) / scale_[c];
    logdet[r] += shift;
  }
}

void Standardize::inverse(Matrix& y, Vector& logdet) const {
  check_width(y, dim(), "Standardize");
  double shift = 0.0;
  for (double s : scale_) shift += std::log(std::abs(s));
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * scale_[c] + mean_[c];
    logdet[r] += shift;
  }
}

void Standardize::flip(std::size_t component) {
  require(component < dim(), ErrorCode::kInvalidArgument, "Standardize::flip: component out of range");
  scale_[component] = -scale_[component];
}

// ---------------------------------------------------------------- FixedAffine

FixedAffine::FixedAffine(Vector mean, Matrix map, Matrix inverse_map)
    : mean_(std::move(mean)), map_(std::move(map)), inverse_map_(std::move(inverse_map)) {
  const std::size_t d = mean_.size();
  require(map_.rows() == d && map_.cols() == d && inverse_map_.rows() == d && inverse_map_.cols() == d,
          ErrorCode::kShapeMismatch, "FixedAffine: map shapes differ from the mean");
  // |det A| from the Gram matrix AᵀA.
  numerics::EigenRowMatrix gram = map_.map().transpose() * map_.map();
  logdet_ = 0.5 * numerics::cholesky_logdet(Matrix::from_eigen(0.5 * (gram + gram.transpose()))).logdet;
}

void FixedAffine::forward(Matrix& x, Vector& logdet) const {
  check_width(x, dim(), "FixedAffine");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] -= mean_[c];
    logdet[r] += logdet_;
  }
  numerics::EigenRowMatrix out = x.map() * map_.map().transpose();
  x.map() = out;
}

void FixedAffine::inverse(Matrix& y, Vector& logdet) const {
  check_width(y, dim(), "FixedAffine");
  numerics::EigenRowMatrix out = y.map() * inverse_map_.map().transpose();
  y.map() = out;
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += mean_[c];
    logdet[r] -= logdet_;
  }
}

Matrix FixedAffine::backward(const Matrix& upstream) const {
  numerics::EigenRowMatrix g = upstream.map() * map_.map();
  return Matrix::from_eigen(g);
}

// ------------------------------------------------------------- DiagonalAffine

DiagonalAffine::DiagonalAffine(std::size_t dim) : dim_(dim), params_(2 * dim, 0.0) {}

DiagonalAffine::DiagonalAffine(Vector log_scale, Vector shift) : dim_(log_scale.size()) {
  require(log_scale.size() == shift.size(), ErrorCode::kShapeMismatch, "DiagonalAffine: size mismatch");
  params_ = std::move(log_scale);
  params_.insert(params_.end(), shift.begin(), shift.end());
}

void DiagonalAffine::forward(Matrix& x, Vector& logdet) const {
  check_width(x, dim_, "DiagonalAffine");
  double sum = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) sum += params_[c];
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < dim_; ++c) row[c] = row[c] * std::exp(params_[c]) + params_[dim_ + c];
    logdet[r] += sum;
  }
}

void DiagonalAffine::inverse(Matrix& y, Vector& logdet) const {
  check_width(y, dim_, "DiagonalAffine");
  double sum = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) sum += params_[c];
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < dim_; ++c) row[c] = (row[c] - params_[dim_ + c]) * std::exp(-params_[c]);
    logdet[r] -= sum;
  }
}

LayerGradients DiagonalAffine::backward(const Matrix& input, const Matrix& upstream,
                                        std::span<const double> upstream_logdet) const {
  LayerGradients g{Vector(params_.size(), 0.0), Matrix(input.rows(), dim_)};
  double logdet_total = 0.0;
  for (double v : upstream_logdet) logdet_total += v;
  for (std::size_t r = 0; r < input.rows(); ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      const double scale = std::exp(params_[c]);
      const double gy = upstream(r, c);
      g.input(r, c) = gy * scale;
      g.parameters[c] += gy * input(r, c) * scale;
      g.parameters[dim_ + c] += gy;
    }
  }
  for (std::size_t c = 0; c < dim_; ++c) g.parameters[c] += logdet_total;
  return g;
}

// --------------------------------------------------------------- TanhResidual

namespace {

// tanh through a single exp; absolute error is a few ulp of 1.
inline double fast_tanh(double z) {
  if (z > 20.0) return 1.0;
  if (z < -20.0) return -1.0;
  return 1.0 - 2.0 / (std::exp(2.0 * z) + 1.0);
}

}  // namespace

TanhResidual::TanhResidual(std::size_t dim) : dim_(dim), params_(3 * dim, 0.0) {
  for (std::size_t c = 0; c < dim; ++c) params_[c] = std::log(kMinSlope);
}

void TanhResidual::forward(Matrix& x, Vector& logdet) const {
  check_width(x, dim_, "TanhResidual");
  for (std::size_t c = 0; c < dim_; ++c) {
    const double u = std::exp(params_[c]) - kMinSlope;
    const double b = std::exp(params_[dim_ + c]);
    const double shift = params_[2 * dim_ + c];
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double th = fast_tanh(b * x(r, c) + shift);
      x(r, c) += (u / b) * th;
      logdet[r] += std::log(1.0 + u * (1.0 - th * th));
    }
  }
}

void TanhResidual::inverse(Matrix& y, Vector& logdet) const {
  check_width(y, dim_, "TanhResidual");
  for (std::size_t c = 0; c < dim_; ++c) {
    const double u = std::exp(params_[c]) - kMinSlope;
    const double b = std::exp(params_[dim_ + c]);
    const double shift = params_[2 * dim_ + c];
    const double reach = std::abs(u) / b;
    for (std::size_t r = 0; r < y.rows(); ++r) {
      const double target = y(r, c);
      double lo = target - reach;
      double hi = target + reach;
      double x = target;
      // Safeguarded Newton on the monotone residual.
      for (int it = 0; it < 200; ++it) {
        const double th = fast_tanh(b * x + shift);
        const double f = x + (u / b) * th - target;
        if (f > 0) hi = x; else lo = x;
        const double slope = 1.0 + u * (1.0 - th * th);
        double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) {
          x = next;
          break;
        }
        x = next;
      }
      const double th = fast_tanh(b * x + shift);
      logdet[r] -= std::log1p(u * (1.0 - th * th));
      y(r, c) = x;
    }
  }
}

LayerGradients TanhResidual::backward(const Matrix& input, const Matrix& upstream,
                                      std::span<const double> upstream_logdet) const {
  LayerGradients g{Vector(params_.size(), 0.0), Matrix(input.rows(), dim_)};
  for (std::size_t c = 0; c < dim_; ++c) {
    const double e_eta = std::exp(params_[c]);
    const double u = e_eta - kMinSlope;
    const double b = std::exp(params_[dim_ + c]);
    const double shift = params_[2 * dim_ + c];
    double d_eta = 0.0;
    double d_beta = 0.0;
    double d_shift = 0.0;
    for (std::size_t r = 0; r < input.rows(); ++r) {
      const double x = input(r, c);
      const double th = fast_tanh(b * x + shift);
      const double s2 = 1.0 - th * th;
      const double jac = 1.0 + u * s2;
      const double gy = upstream(r, c);
      const double gl = upstream_logdet[r];
      // d log J / dz with z = b x + shift
      const double dlogj_dz = -2.0 * u * th * s2 / jac;
      g.input(r, c) = gy * jac + gl * dlogj_dz * b;
      d_eta += gy * th / b + gl * s2 / jac;
      d_beta += gy * (-(u / (b * b)) * th + (u / b) * s2 * x) + gl * dlogj_dz * x;
      d_shift += gy * (u / b) * s2 + gl * dlogj_dz;
    }
    g.parameters[c] = d_eta * e_eta;
    g.parameters[dim_ + c] = d_beta * b;
    g.parameters[2 * dim_ + c] = d_shift;
  }
  return g;
}

// ------------------------------------------------------------- AffineCoupling

AffineCoupling::AffineCoupling(std::size_t dim, std::size_t split, std::vector<std::size_t> hidden,
                               double scale_clamp)
    : dim_(dim), split_(split), scale_clamp_(scale_clamp) {
  require(split > 0 && split < dim, ErrorCode::kInvalidArgument,
          "AffineCoupling: split must leave both parts nonempty");
  require(scale_clamp > 0.0, ErrorCode::kInvalidArgument, "AffineCoupling: scale clamp must be positive");
  std::vector<std::size_t> widths{split};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2 * (dim - split));
  conditioner_ = nn::Mlp(std::move(widths));
}

AffineCoupling::AffineCoupling(std::size_t dim, std::size_t split, nn::Mlp conditioner,
                               double scale_clamp)
    : dim_(dim), split_(split), scale_clamp_(scale_clamp), conditioner_(std::move(conditioner)) {
  require(split > 0 && split < dim, ErrorCode::kInvalidArgument,
          "AffineCoupling: split must leave both parts nonempty");
  require(conditioner_.input_width() == split && conditioner_.output_width() == 2 * (dim - split),
          ErrorCode::kShapeMismatch, "AffineCoupling: conditioner widths do not fit the split");
}

void AffineCoupling::forward(Matrix& x, Vector& logdet, Tape* tape) const {
  check_width(x, dim_, "AffineCoupling");
  const std::size_t n = x.rows();
  const std::size_t active = dim_ - split_;
  Matrix passive = x.col_block(0, split_);
  Matrix out;
  if (tape) {
    auto fwd = conditioner_.forward(passive);
    out = std::move(fwd.output);
    tape->conditioner = std::move(fwd.tape);
    tape->input = x;
    tape->scale = Matrix(n, active);
    tape->tanh_raw = Matrix(n, active);
  } else {
    out = conditioner_.predict(passive);
  }
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < active; ++j) {
      const double h = fast_tanh(out(r, j) / scale_clamp_);
      const double s = scale_clamp_ * h;
      x(r, split_ + j) = x(r, split_ + j) * std::exp(s) + out(r, active + j);
      sum += s;
      if (tape) {
        tape->scale(r, j) = s;
        tape->tanh_raw(r, j) = h;
      }
    }
    logdet[r] += sum;
  }
}

void AffineCoupling::inverse(Matrix& y, Vector& logdet) const {
  check_width(y, dim_, "AffineCoupling");
  const std::size_t active = dim_ - split_;
  const Matrix out = conditioner_.predict(y.col_block(0, split_));
  for (std::size_t r = 0; r < y.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < active; ++j) {
      const double s = scale_clamp_ * fast_tanh(out(r, j) / scale_clamp_);
      y(r, split_ + j) = (y(r, split_ + j) - out(r, active + j)) * std::exp(-s);
      sum += s;
    }
    logdet[r] -= sum;
  }
}

LayerGradients AffineCoupling::backward(const Tape& tape, const Matrix& upstream,
                                        std::span<const double> upstream_logdet) const {
  const std::size_t n = tape.input.rows();
  const std::size_t active = dim_ - split_;
  require(upstream.rows() == n && upstream.cols() == dim_ && upstream_logdet.size() == n,
          ErrorCode::kShapeMismatch, "AffineCoupling::backward: upstream shape mismatch");
  LayerGradients g;
  g.input = Matrix(n, dim_);
  Matrix d_out(n, 2 * active);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < active; ++j) {
      const double e = std::exp(tape.scale(r, j));
      const double gy = upstream(r, split_ + j);
      g.input(r, split_ + j) = gy * e;
      const double ds = gy * tape.input(r, split_ + j) * e + upstream_logdet[r];
      const double h = tape.tanh_raw(r, j);
      d_out(r, j) = ds * (1.0 - h * h);
      d_out(r, active + j) = gy;
    }
  }
  nn::MlpGradients mg = conditioner_.backward(tape.conditioner, d_out);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < split_; ++c) g.input(r, c) = upstream(r, c) + mg.input(r, c);
  g.parameters = std::move(mg.parameters);
  return g;
}

// ----------------------------------------------------------------------- Swap

void Swap::forward(Matrix& x) const {
  check_width(x, dim_, "Swap");
  Vector tmp(dim_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < dim_; ++c) tmp[c] = row[(c + shift_) % dim_];
    std::copy(tmp.begin(), tmp.end(), row.begin());
  }
}

void Swap::inverse(Matrix& y) const {
  check_width(y, dim_, "Swap");
  Vector tmp(dim_);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < dim_; ++c) tmp[(c + shift_) % dim_] = row[c];
    std::copy(tmp.begin(), tmp.end(), row.begin());
  }
}

Matrix Swap::backward(const Matrix& upstream) const {
  Matrix g = upstream;
  inverse(g);
  return g;
}

}  // namespace mienf::flows
