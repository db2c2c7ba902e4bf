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

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "common/error.hpp"

namespace mienf::numerics {

using EigenRowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<EigenRowMatrix>;
using ConstMatrixMap = Eigen::Map<const EigenRowMatrix>;

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
///
/// Constructors that take caller data reject NaN/Inf. Element access through
/// operator() is unchecked so inner loops stay cheap.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix from_eigen(const EigenRowMatrix& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  const std::vector<double>& values() const noexcept { return data_; }

  MatrixMap map() noexcept {
    return {data_.data(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }
  ConstMatrixMap map() const noexcept {
    return {data_.data(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }

  Matrix transpose() const;
  // Columns [first, first + count).
  Matrix col_block(std::size_t first, std::size_t count) const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr,
               std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);
  Matrix select_rows(std::span<const std::size_t> idx) const;

  bool all_finite() const noexcept;
  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

// Horizontal concatenation [a | b].
Matrix hconcat(const Matrix& a, const Matrix& b);

// Column means and biased (1/N) covariance of the rows.
Vector column_means(const Matrix& samples);
Matrix covariance(const Matrix& samples);

// Asymmetry max |S - Sᵀ| relative to max |S|.
double asymmetry(const Matrix& s) noexcept;

}  // namespace mienf::numerics
