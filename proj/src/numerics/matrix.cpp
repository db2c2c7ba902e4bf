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

#include "numerics/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mienf::numerics {

namespace {

void check_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) raise(ErrorCode::kNonFinite, "Matrix: non-finite entry");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, ErrorCode::kShapeMismatch,
          "Matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
              std::to_string(data_.size()));
  check_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::kShapeMismatch, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  check_finite(d);
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_eigen(const EigenRowMatrix& m) {
  Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  out.map() = m;
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::col_block(std::size_t first, std::size_t count) const {
  return block(0, first, rows_, count);
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, ErrorCode::kShapeMismatch,
          "Matrix::block out of range");
  Matrix b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    std::copy_n(data_.data() + (r0 + r) * cols_ + c0, nc, b.data() + r * nc);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  require(r0 + src.rows() <= rows_ && c0 + src.cols() <= cols_,
          ErrorCode::kShapeMismatch, "Matrix::set_block out of range");
  for (std::size_t r = 0; r < src.rows(); ++r)
    std::copy_n(src.data() + r * src.cols(), src.cols(),
                data_.data() + (r0 + r) * cols_ + c0);
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(data_.data() + idx[i] * cols_, cols_, out.data() + i * cols_);
  }
  return out;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kShapeMismatch, "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          "matrix add: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          "matrix subtract: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= s;
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::kShapeMismatch, "matvec: size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorCode::kShapeMismatch, "hconcat: row counts differ");
  Matrix c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

Vector column_means(const Matrix& samples) {
  require(samples.rows() > 0, ErrorCode::kInsufficientSamples, "column_means: no rows");
  Vector m(samples.cols(), 0.0);
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    auto row = samples.row(r);
    for (std::size_t c = 0; c < m.size(); ++c) m[c] += row[c];
  }
  for (double& v : m) v /= static_cast<double>(samples.rows());
  return m;
}

Matrix covariance(const Matrix& samples) {
  const Vector mean = column_means(samples);
  const std::size_t d = samples.cols();
  EigenRowMatrix centered = samples.map();
  for (std::size_t c = 0; c < d; ++c) centered.col(static_cast<Eigen::Index>(c)).array() -= mean[c];
  EigenRowMatrix cov = (centered.transpose() * centered) / static_cast<double>(samples.rows());
  cov = 0.5 * (cov + cov.transpose()).eval();
  return Matrix::from_eigen(cov);
}

double asymmetry(const Matrix& s) noexcept {
  if (s.rows() != s.cols()) return INFINITY;
  double diff = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j)
      diff = std::max(diff, std::abs(s(i, j) - s(j, i)));
  const double scale = s.max_abs();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace mienf::numerics
