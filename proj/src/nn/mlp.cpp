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

#include "nn/mlp.hpp"

#include <cmath>
#include <string>

namespace mienf::nn {

namespace {

using numerics::ConstMatrixMap;
using numerics::EigenRowMatrix;
using numerics::MatrixMap;

using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;

}  // namespace

Mlp::Mlp(std::vector<std::size_t> widths, double leaky_slope)
    : widths_(std::move(widths)), slope_(leaky_slope) {
  require(widths_.size() >= 2, ErrorCode::kInvalidArgument, "Mlp: need at least two widths");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    require(widths_[l] > 0 && widths_[l + 1] > 0, ErrorCode::kInvalidArgument,
            "Mlp: zero layer width");
    offsets_.push_back(total);
    total += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::initialize(Rng& rng, bool zero_final_layer) {
  ++generation_;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t fan_in = widths_[l];
    const std::size_t fan_out = widths_[l + 1];
    const bool zero = zero_final_layer && l + 1 == layer_count();
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    double* w = params_.data() + weight_offset(l);
    for (std::size_t i = 0; i < fan_in * fan_out; ++i) w[i] = zero ? 0.0 : dist(rng);
    double* b = params_.data() + bias_offset(l);
    for (std::size_t i = 0; i < fan_out; ++i) b[i] = 0.0;
  }
}

Matrix Mlp::run(const Matrix& x, GradTape* tape) const {
  require(x.cols() == input_width(), ErrorCode::kShapeMismatch,
          "Mlp::forward: input has " + std::to_string(x.cols()) + " columns, expected " +
              std::to_string(input_width()));
  if (tape) {
    tape->owner = this;
    tape->generation = generation_;
    tape->inputs.clear();
    tape->pre.clear();
  }
  const auto n = static_cast<Eigen::Index>(x.rows());
  EigenRowMatrix act = x.map();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    ConstMatrixMap w(params_.data() + weight_offset(l), in, out);
    ConstVectorMap b(params_.data() + bias_offset(l), out);
    EigenRowMatrix pre(n, out);
    pre.noalias() = act * w;
    pre.rowwise() += b;
    if (tape) tape->inputs.push_back(Matrix::from_eigen(act));
    if (l + 1 == layer_count()) {
      act = std::move(pre);
    } else {
      if (tape) tape->pre.push_back(Matrix::from_eigen(pre));
      const double slope = slope_;
      act = pre.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
    }
  }
  return Matrix::from_eigen(act);
}

Mlp::ForwardResult Mlp::forward(const Matrix& x) const {
  ForwardResult result;
  result.output = run(x, &result.tape);
  return result;
}

Matrix Mlp::predict(const Matrix& x) const { return run(x, nullptr); }

MlpGradients Mlp::backward(const GradTape& tape, const Matrix& upstream) const {
  require(tape.owner == this && tape.generation == generation_ &&
              tape.inputs.size() == layer_count(),
          ErrorCode::kStaleTape, "Mlp::backward: tape does not match this network state");
  const std::size_t n = tape.inputs.front().rows();
  require(upstream.rows() == n && upstream.cols() == output_width(), ErrorCode::kShapeMismatch,
          "Mlp::backward: upstream gradient shape differs from the forward output");

  MlpGradients grads;
  grads.parameters.assign(params_.size(), 0.0);
  EigenRowMatrix delta = upstream.map();
  for (std::size_t l = layer_count(); l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    if (l + 1 < layer_count()) {
      const ConstMatrixMap pre = tape.pre[l].map();
      const double slope = slope_;
      delta = delta.cwiseProduct(pre.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; }));
    }
    const ConstMatrixMap input = tape.inputs[l].map();
    MatrixMap dw(grads.parameters.data() + weight_offset(l), in, out);
    dw.noalias() = input.transpose() * delta;
    Eigen::Map<Eigen::RowVectorXd> db(grads.parameters.data() + bias_offset(l), out);
    db = delta.colwise().sum();
    ConstMatrixMap w(params_.data() + weight_offset(l), in, out);
    EigenRowMatrix next = delta * w.transpose();
    delta = std::move(next);
  }
  grads.input = Matrix::from_eigen(delta);
  return grads;
}

}  // namespace mienf::nn
