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

#include "flows/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mienf::flows {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::size_t layer_dim(const Layer& layer) {
  return std::visit([](const auto& l) { return l.dim(); }, layer);
}

std::size_t layer_parameter_count(const Layer& layer) {
  return std::visit([](const auto& l) { return l.parameter_count(); }, layer);
}

void check_finite(const Matrix& z, const Vector& logdet, const char* who) {
  bool ok = z.all_finite();
  for (double v : logdet) ok = ok && std::isfinite(v);
  if (!ok) raise(ErrorCode::kNonFinite, std::string(who) + ": non-finite latent or log-det");
}

}  // namespace

CompositeFlow::CompositeFlow(std::size_t dim, std::vector<Layer> layers)
    : dim_(dim), layers_(std::move(layers)) {
  require(dim_ > 0, ErrorCode::kInvalidArgument, "CompositeFlow: dimension must be positive");
  for (const auto& layer : layers_)
    require(layer_dim(layer) == dim_, ErrorCode::kShapeMismatch,
            "CompositeFlow: layer dimension differs from flow dimension");
}

CompositeFlow CompositeFlow::make_default(const Matrix& data, const FlowConfig& config, Rng& rng) {
  const std::size_t d = data.cols();
  require(d > 0, ErrorCode::kInvalidArgument, "make_default: zero-dimensional data");
  std::vector<Layer> layers;
  if (config.standardize) layers.emplace_back(Standardize::fit(data));
  if (d == 1) {
    for (std::size_t i = 0; i < config.coupling_layers; ++i) {
      layers.emplace_back(TanhResidual(1));
      layers.emplace_back(DiagonalAffine(1));
    }
    return CompositeFlow(d, std::move(layers));
  }
  const std::size_t split = (d + 1) / 2;
  const std::vector<std::size_t> hidden(config.hidden_layers, config.hidden_width);
  for (std::size_t i = 0; i < config.coupling_layers; ++i) {
    if (config.elementwise)
      for (std::size_t k = 0; k < config.elementwise_layers; ++k) layers.emplace_back(TanhResidual(d));
    AffineCoupling coupling(d, split, hidden, config.scale_clamp);
    coupling.initialize(rng);
    layers.emplace_back(std::move(coupling));
    layers.emplace_back(Swap(d, split));
  }
  return CompositeFlow(d, std::move(layers));
}

std::size_t CompositeFlow::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer_parameter_count(layer);
  return total;
}

Vector CompositeFlow::parameters() const {
  Vector out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    std::visit(Overloaded{[&](const DiagonalAffine& l) {
                            out.insert(out.end(), l.parameters().begin(), l.parameters().end());
                          },
                          [&](const TanhResidual& l) {
                            out.insert(out.end(), l.parameters().begin(), l.parameters().end());
                          },
                          [&](const AffineCoupling& l) {
                            out.insert(out.end(), l.parameters().begin(), l.parameters().end());
                          },
                          [](const auto&) {}},
               layer);
  }
  return out;
}

void CompositeFlow::set_parameters(std::span<const double> values) {
  require(values.size() == parameter_count(), ErrorCode::kShapeMismatch,
          "CompositeFlow::set_parameters: wrong parameter count");
  ++generation_;
  std::size_t offset = 0;
  auto assign = [&](std::span<double> dst) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  };
  for (auto& layer : layers_) {
    std::visit(Overloaded{[&](DiagonalAffine& l) { assign(l.mutable_parameters()); },
                          [&](TanhResidual& l) { assign(l.mutable_parameters()); },
                          [&](AffineCoupling& l) { assign(l.mutable_parameters()); },
                          [](auto&) {}},
               layer);
  }
}

CompositeFlow::ForwardResult CompositeFlow::run(const Matrix& x, bool record) const {
  require(x.cols() == dim_, ErrorCode::kShapeMismatch,
          "flow_forward: batch has " + std::to_string(x.cols()) + " columns, flow dimension is " +
              std::to_string(dim_));
  ForwardResult result;
  result.latent = x;
  result.logdet.assign(x.rows(), 0.0);
  if (record) {
    result.tape.owner = this;
    result.tape.generation = generation_;
    result.tape.layers.reserve(layers_.size());
  }
  Matrix& z = result.latent;
  Vector& ld = result.logdet;
  for (const auto& layer : layers_) {
    std::visit(Overloaded{[&](const Standardize& l) {
                            l.forward(z, ld);
                            if (record) result.tape.layers.emplace_back(std::monostate{});
                          },
                          [&](const FixedAffine& l) {
                            l.forward(z, ld);
                            if (record) result.tape.layers.emplace_back(std::monostate{});
                          },
                          [&](const DiagonalAffine& l) {
                            if (record) result.tape.layers.emplace_back(z);
                            l.forward(z, ld);
                          },
                          [&](const TanhResidual& l) {
                            if (record) result.tape.layers.emplace_back(z);
                            l.forward(z, ld);
                          },
                          [&](const AffineCoupling& l) {
                            if (record) {
                              AffineCoupling::Tape t;
                              l.forward(z, ld, &t);
                              result.tape.layers.emplace_back(std::move(t));
                            } else {
                              l.forward(z, ld, nullptr);
                            }
                          },
                          [&](const Swap& l) {
                            l.forward(z);
                            if (record) result.tape.layers.emplace_back(std::monostate{});
                          }},
               layer);
  }
  check_finite(z, ld, "flow_forward");
  return result;
}

CompositeFlow::ForwardResult CompositeFlow::forward(const Matrix& x) const { return run(x, true); }

std::pair<Matrix, Vector> CompositeFlow::transform(const Matrix& x) const {
  ForwardResult r = run(x, false);
  return {std::move(r.latent), std::move(r.logdet)};
}

std::pair<Matrix, Vector> CompositeFlow::inverse_with_logdet(const Matrix& z) const {
  require(z.cols() == dim_, ErrorCode::kShapeMismatch, "flow_inverse: latent width differs from flow dimension");
  Matrix x = z;
  Vector ld(z.rows(), 0.0);
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    std::visit(Overloaded{[&](const Swap& l) { l.inverse(x); },
                          [&](const auto& l) { l.inverse(x, ld); }},
               *it);
  }
  check_finite(x, ld, "flow_inverse");
  return {std::move(x), std::move(ld)};
}

FlowGradients CompositeFlow::backward(const FlowTape& tape, const Matrix& upstream_latent,
                                      std::span<const double> upstream_logdet) const {
  require(tape.owner == this && tape.generation == generation_ &&
              tape.layers.size() == layers_.size(),
          ErrorCode::kStaleTape, "flow_backward: tape does not match this flow state");
  require(upstream_latent.cols() == dim_ && upstream_logdet.size() == upstream_latent.rows(),
          ErrorCode::kShapeMismatch, "flow_backward: upstream shape mismatch");

  FlowGradients grads;
  grads.parameters.assign(parameter_count(), 0.0);
  // Parameter offsets of every layer.
  std::vector<std::size_t> offsets(layers_.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    offsets[i] = offset;
    offset += layer_parameter_count(layers_[i]);
  }

  Matrix g = upstream_latent;
  auto store = [&](std::size_t i, const Vector& p) {
    std::copy(p.begin(), p.end(), grads.parameters.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
  };
  // The log-det is a plain sum over layers, so every layer sees the same
  // upstream log-det gradient.
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& rec = tape.layers[i];
    std::visit(Overloaded{[&](const Standardize& l) {
                            for (std::size_t r = 0; r < g.rows(); ++r)
                              for (std::size_t c = 0; c < dim_; ++c) g(r, c) /= l.scale()[c];
                          },
                          [&](const FixedAffine& l) { g = l.backward(g); },
                          [&](const DiagonalAffine& l) {
                            auto lg = l.backward(std::get<Matrix>(rec), g, upstream_logdet);
                            store(i, lg.parameters);
                            g = std::move(lg.input);
                          },
                          [&](const TanhResidual& l) {
                            auto lg = l.backward(std::get<Matrix>(rec), g, upstream_logdet);
                            store(i, lg.parameters);
                            g = std::move(lg.input);
                          },
                          [&](const AffineCoupling& l) {
                            auto lg = l.backward(std::get<AffineCoupling::Tape>(rec), g, upstream_logdet);
                            store(i, lg.parameters);
                            g = std::move(lg.input);
                          },
                          [&](const Swap& l) { g = l.backward(g); }},
               layers_[i]);
  }
  grads.input = std::move(g);
  return grads;
}

ProductFlow::ForwardResult ProductFlow::forward(const Matrix& x, const Matrix& y) const {
  require(x.rows() == y.rows(), ErrorCode::kShapeMismatch, "ProductFlow: x and y row counts differ");
  ForwardResult r{fx.forward(x), fy.forward(y), {}};
  r.logdet.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) r.logdet[i] = r.x.logdet[i] + r.y.logdet[i];
  return r;
}

}  // namespace mienf::flows
