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

#include <cmath>
#include <random>

#include "common/error.hpp"
#include "doctest.h"
#include "flows/flow.hpp"
#include "flows/serialize.hpp"
#include "helpers.hpp"

using namespace mienf::flows;
using mienf::numerics::Matrix;
using mienf::numerics::Vector;

namespace {

// Small random parameters so every layer departs from the identity.
void perturb(CompositeFlow& flow, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Vector p = flow.parameters();
  for (double& v : p) v += n(gen);
  flow.set_parameters(p);
}

CompositeFlow random_flow(std::size_t dim, std::size_t couplings, std::uint64_t seed, bool with_standardize) {
  std::mt19937_64 gen(seed);
  const Matrix data = testing::gaussian_matrix(64, dim, gen, 2.0);
  FlowConfig cfg;
  cfg.coupling_layers = couplings;
  cfg.hidden_width = 8;
  cfg.hidden_layers = 1;
  cfg.standardize = with_standardize;
  mienf::Rng rng = mienf::make_rng(seed);
  CompositeFlow flow = CompositeFlow::make_default(data, cfg, rng);
  perturb(flow, gen, 0.2);
  return flow;
}

// Σ A ⊙ z + Σ b ⊙ logdet.
double linear_loss(const CompositeFlow& flow, const Matrix& x, const Matrix& a, const Vector& b) {
  const auto [z, ld] = flow.transform(x);
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) total += a.data()[i] * z.data()[i];
  for (std::size_t k = 0; k < ld.size(); ++k) total += b[k] * ld[k];
  return total;
}

void check_flow_gradients(const CompositeFlow& flow, std::mt19937_64& gen) {
  const std::size_t d = flow.dim();
  const Matrix x = testing::gaussian_matrix(5, d, gen);
  const Matrix a = testing::gaussian_matrix(5, d, gen);
  Vector b(5);
  std::normal_distribution<double> n;
  for (double& v : b) v = n(gen);

  const auto fwd = flow.forward(x);
  const auto g = flow.backward(fwd.tape, a, b);

  const Vector p0 = flow.parameters();
  CompositeFlow probe = flow;
  const auto fd = oracle::gradient(
      [&](const std::vector<double>& p) {
        probe.set_parameters(p);
        return linear_loss(probe, x, a, b);
      },
      p0, 1e-5);
  CHECK(oracle::max_relative_error(g.parameters, fd) < 1e-4);

  const auto fdx = oracle::gradient(
      [&](const std::vector<double>& v) { return linear_loss(flow, Matrix(x.rows(), d, v), a, b); }, x.values(),
      1e-5);
  CHECK(oracle::max_relative_error(g.input.values(), fdx) < 1e-4);
}

}  // namespace

TEST_CASE("freshly initialized flow is the identity") {
  std::mt19937_64 gen(1);
  const Matrix data = testing::gaussian_matrix(32, 4, gen);
  FlowConfig cfg;
  cfg.standardize = false;
  mienf::Rng rng = mienf::make_rng(3);
  const CompositeFlow flow = CompositeFlow::make_default(data, cfg, rng);
  const auto [z, ld] = flow.transform(data);
  CHECK(testing::max_abs_diff(z, data) < 1e-14);
  for (double v : ld) CHECK(std::abs(v) < 1e-14);
  CHECK(testing::max_abs_diff(flow.inverse(data), data) < 1e-14);
}

TEST_CASE("diagonal affine log-det and inverse") {
  const Vector a{2.0, 0.5, 3.0};
  Vector log_a;
  for (double v : a) log_a.push_back(std::log(v));
  CompositeFlow flow(3, {DiagonalAffine(log_a, Vector{0.0, 0.0, 0.0})});
  const Matrix x{{1, 1, 1}, {-2, 0.5, 4}};
  const auto [z, ld] = flow.transform(x);
  CHECK(ld[0] == doctest::Approx(std::log(3.0)));
  CHECK(z(1, 2) == doctest::Approx(12.0));

  CompositeFlow twice(2, {DiagonalAffine(Vector{std::log(2.0), std::log(2.0)}, Vector{0.0, 0.0})});
  const Matrix zz{{4, -2}};
  CHECK(twice.inverse(zz) == Matrix{{2, -1}});
}

TEST_CASE("log-det of the sum over the batch has gradient equal to the batch size") {
  CompositeFlow flow(2, {DiagonalAffine(Vector{0.3, -0.2}, Vector{0.1, 0.0})});
  std::mt19937_64 gen(2);
  const Matrix x = testing::gaussian_matrix(7, 2, gen);
  const auto fwd = flow.forward(x);
  const auto g = flow.backward(fwd.tape, Matrix(7, 2, 0.0), Vector(7, 1.0));
  CHECK(g.parameters[0] == doctest::Approx(7.0));
  CHECK(g.parameters[1] == doctest::Approx(7.0));
  CHECK(g.parameters[2] == doctest::Approx(0.0));
  CHECK(g.parameters[3] == doctest::Approx(0.0));
}

TEST_CASE("zero upstream gives zero flow gradients") {
  const CompositeFlow flow = random_flow(4, 2, 9, true);
  std::mt19937_64 gen(4);
  const Matrix x = testing::gaussian_matrix(3, 4, gen);
  const auto fwd = flow.forward(x);
  const auto g = flow.backward(fwd.tape, Matrix(3, 4, 0.0), Vector(3, 0.0));
  for (double v : g.parameters) CHECK(v == 0.0);
  CHECK(g.input.max_abs() == 0.0);
}

TEST_CASE("log-det matches the numerical Jacobian determinant") {
  for (std::size_t d = 1; d <= 4; ++d) {
    CAPTURE(d);
    const CompositeFlow flow = random_flow(d, 4, 20 + d, true);
    std::mt19937_64 gen(d);
    const Matrix x = testing::gaussian_matrix(3, d, gen);
    const auto [z, ld] = flow.transform(x);
    for (std::size_t r = 0; r < 3; ++r) {
      const auto jac = oracle::jacobian(
          [&](const std::vector<double>& v) { return testing::row_vector(flow.transform(Matrix(1, d, v)).first, 0); },
          testing::row_vector(x, r));
      CHECK(ld[r] == doctest::Approx(std::log(std::abs(oracle::determinant(jac)))).epsilon(1e-5));
    }
  }
}

TEST_CASE("inverse recovers the input") {
  for (std::size_t d : {1, 2, 3, 6}) {
    CAPTURE(d);
    const CompositeFlow flow = random_flow(d, 4, 40 + d, true);
    std::mt19937_64 gen(d + 100);
    const Matrix x = testing::gaussian_matrix(50, d, gen);
    const auto [z, ld] = flow.transform(x);
    const auto [back, inv_ld] = flow.inverse_with_logdet(z);
    CHECK(testing::max_abs_diff(back, x) < 1e-7);
    for (std::size_t r = 0; r < 50; ++r) CHECK(inv_ld[r] == doctest::Approx(-ld[r]).epsilon(1e-8));
  }
}

TEST_CASE("flow gradients match central differences") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 6; ++trial) {
    CAPTURE(trial);
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 4;
    check_flow_gradients(random_flow(d, 2, 300 + trial, trial % 2 == 0), gen);
  }
}

TEST_CASE("individual layers match central differences") {
  std::mt19937_64 gen(5);
  SUBCASE("tanh residual") {
    TanhResidual layer(3);
    auto p = layer.mutable_parameters();
    std::normal_distribution<double> n(0.0, 0.5);
    for (double& v : p) v += n(gen);
    check_flow_gradients(CompositeFlow(3, {layer}), gen);
  }
  SUBCASE("affine coupling with clamping") {
    AffineCoupling layer(5, 2, std::vector<std::size_t>{6}, 0.8);
    CompositeFlow flow(5, {layer});
    perturb(flow, gen, 0.7);
    check_flow_gradients(flow, gen);
  }
  SUBCASE("standardize with a flipped component and swap") {
    Standardize st(Vector{0.5, -1.0, 2.0}, Vector{2.0, 0.5, 1.5});
    st.flip(1);
    CompositeFlow flow(3, {st, Swap(3, 2), TanhResidual(3), DiagonalAffine(3)});
    perturb(flow, gen, 0.3);
    check_flow_gradients(flow, gen);
    const auto [z, ld] = CompositeFlow(3, {st}).transform(Matrix{{0.5, -1.0, 2.0}});
    CHECK(ld[0] == doctest::Approx(-std::log(1.5)));
  }
  SUBCASE("fixed affine") {
    const Matrix a{{2.0, 0.5}, {-1.0, 1.0}};
    const Matrix a_inv = testing::from_dense(oracle::inverse(testing::to_dense(a)));
    CompositeFlow flow(2, {FixedAffine(Vector{1.0, -1.0}, a, a_inv), DiagonalAffine(2)});
    perturb(flow, gen, 0.3);
    check_flow_gradients(flow, gen);
    const auto [z, ld] = CompositeFlow(2, {FixedAffine(Vector{1.0, -1.0}, a, a_inv)}).transform(Matrix{{1.0, 0.0}});
    CHECK(ld[0] == doctest::Approx(std::log(2.5)));
    CHECK(z(0, 0) == doctest::Approx(0.5));
    CHECK(z(0, 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("swap rotates components") {
  CompositeFlow flow(3, {Swap(3, 2)});
  const Matrix x{{1, 2, 3}};
  CHECK(flow.transform(x).first == Matrix{{3, 1, 2}});
  CHECK(flow.inverse(Matrix{{3, 1, 2}}) == x);
}

TEST_CASE("stale tapes are rejected") {
  CompositeFlow flow = random_flow(2, 1, 3, false);
  const auto fwd = flow.forward(Matrix{{0.1, 0.2}});
  flow.set_parameters(flow.parameters());
  CHECK_THROWS_AS(flow.backward(fwd.tape, Matrix{{1.0, 1.0}}, Vector{0.0}), mienf::Error);
}

TEST_CASE("product flow sums the log-dets of both halves") {
  ProductFlow pf{random_flow(2, 2, 1, true), random_flow(3, 2, 2, true)};
  std::mt19937_64 gen(8);
  const Matrix x = testing::gaussian_matrix(4, 2, gen), y = testing::gaussian_matrix(4, 3, gen);
  const auto r = pf.forward(x, y);
  for (std::size_t k = 0; k < 4; ++k) CHECK(r.logdet[k] == doctest::Approx(r.x.logdet[k] + r.y.logdet[k]));
}

TEST_CASE("flow serialization round-trips exactly") {
  const Matrix a{{2.0, 0.5}, {-1.0, 1.0}};
  const Matrix a_inv = testing::from_dense(oracle::inverse(testing::to_dense(a)));
  std::vector<Layer> layers{FixedAffine(Vector{0.1, 0.2}, a, a_inv)};
  const CompositeFlow trained = random_flow(2, 3, 5, true);
  for (const auto& l : trained.layers()) layers.push_back(l);
  const CompositeFlow flow(2, layers);
  const std::string text = serialize_flow(flow);
  const CompositeFlow back = deserialize_flow(text);
  CHECK(back.parameters() == flow.parameters());
  CHECK(back.layers().size() == flow.layers().size());
  std::mt19937_64 gen(6);
  const Matrix x = testing::gaussian_matrix(10, 2, gen);
  CHECK(back.transform(x).first == flow.transform(x).first);
  CHECK(serialize_flow(back) == text);

  auto j = flow_to_json(flow);
  CHECK(j.at("version") == kFlowFormatVersion);
  j["version"] = kFlowFormatVersion + 1;
  CHECK_THROWS_AS(flow_from_json(j), mienf::Error);
  CHECK_THROWS_AS(deserialize_flow("{not json"), mienf::Error);
}
