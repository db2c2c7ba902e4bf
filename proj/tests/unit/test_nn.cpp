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
#include "helpers.hpp"
#include "nn/adam.hpp"
#include "nn/mlp.hpp"

using mienf::nn::AdamState;
using mienf::nn::Mlp;
using mienf::numerics::Matrix;

namespace {

// Σ upstream ⊙ mlp(x) as a function of the flat parameters.
double weighted_output(const Mlp& net, const std::vector<double>& params, const Matrix& x, const Matrix& up) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto out = oracle::mlp_forward(net.widths(), params, testing::row_vector(x, r), net.leaky_slope());
    for (std::size_t c = 0; c < out.size(); ++c) total += up(r, c) * out[c];
  }
  return total;
}

}  // namespace

TEST_CASE("zero-initialized final layer yields zero output") {
  Mlp net({3, 8, 8, 2});
  mienf::Rng rng = mienf::make_rng(1);
  net.initialize(rng, true);
  std::mt19937_64 gen(2);
  const Matrix out = net.predict(testing::gaussian_matrix(5, 3, gen));
  CHECK(out.max_abs() == 0.0);
}

TEST_CASE("single identity layer passes the input through") {
  Mlp net({2, 2});
  auto p = net.mutable_parameters();
  std::fill(p.begin(), p.end(), 0.0);
  p[0] = 1.0;  // W(0,0)
  p[3] = 1.0;  // W(1,1)
  const Matrix x{{1.5, -2.0}, {0.25, 4.0}};
  CHECK(net.predict(x) == x);
}

TEST_CASE("random 2-16-2 network matches the reference forward pass") {
  Mlp net({2, 16, 2});
  mienf::Rng rng = mienf::make_rng(7);
  net.initialize(rng, false);
  std::mt19937_64 gen(3);
  const Matrix x = testing::gaussian_matrix(10, 2, gen);
  const Matrix out = net.predict(x);
  const std::vector<double> params(net.parameters().begin(), net.parameters().end());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto ref = oracle::mlp_forward(net.widths(), params, testing::row_vector(x, r), net.leaky_slope());
    CHECK(out(r, 0) == doctest::Approx(ref[0]).epsilon(1e-13));
    CHECK(out(r, 1) == doctest::Approx(ref[1]).epsilon(1e-13));
  }
}

TEST_CASE("mlp backward") {
  SUBCASE("zero upstream gives zero gradients") {
    Mlp net({3, 5, 2});
    mienf::Rng rng = mienf::make_rng(4);
    net.initialize(rng, false);
    std::mt19937_64 gen(5);
    const Matrix x = testing::gaussian_matrix(4, 3, gen);
    auto fwd = net.forward(x);
    const auto g = net.backward(fwd.tape, Matrix(4, 2, 0.0));
    for (double v : g.parameters) CHECK(v == 0.0);
    CHECK(g.input.max_abs() == 0.0);
  }
  SUBCASE("scalar linear net f(x) = w x") {
    Mlp net({1, 1});
    auto p = net.mutable_parameters();
    p[0] = 0.7;
    p[1] = 0.0;
    const Matrix x{{2.5}};
    auto fwd = net.forward(x);
    const auto g = net.backward(fwd.tape, Matrix{{1.0}});
    CHECK(g.parameters[0] == doctest::Approx(2.5));
    CHECK(g.parameters[1] == doctest::Approx(1.0));
    CHECK(g.input(0, 0) == doctest::Approx(0.7));
  }
  SUBCASE("random nets match central differences") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 8; ++trial) {
      CAPTURE(trial);
      const std::size_t in = 1 + gen() % 4, out = 1 + gen() % 3, hidden = 2 + gen() % 6;
      Mlp net({in, hidden, hidden, out});
      mienf::Rng rng = mienf::make_rng(100 + trial);
      net.initialize(rng, false);
      const Matrix x = testing::gaussian_matrix(6, in, gen);
      const Matrix up = testing::gaussian_matrix(6, out, gen);
      auto fwd = net.forward(x);
      const auto g = net.backward(fwd.tape, up);
      const std::vector<double> p0(net.parameters().begin(), net.parameters().end());
      const auto fd = oracle::gradient([&](const std::vector<double>& p) { return weighted_output(net, p, x, up); },
                                       p0, 1e-5);
      CHECK(oracle::max_relative_error(g.parameters, fd) < 1e-4);
      std::vector<double> xin(x.values());
      const auto fdx = oracle::gradient(
          [&](const std::vector<double>& v) {
            return weighted_output(net, p0, Matrix(x.rows(), x.cols(), v), up);
          },
          xin, 1e-5);
      CHECK(oracle::max_relative_error(g.input.values(), fdx) < 1e-4);
    }
  }
}

TEST_CASE("mutating parameters invalidates tapes") {
  Mlp net({2, 3, 1});
  mienf::Rng rng = mienf::make_rng(0);
  net.initialize(rng, false);
  auto fwd = net.forward(Matrix{{1.0, 2.0}});
  net.mutable_parameters()[0] += 0.1;
  CHECK_THROWS_AS(net.backward(fwd.tape, Matrix{{1.0}}), mienf::Error);
}

TEST_CASE("adam") {
  SUBCASE("zero gradients leave parameters unchanged") {
    std::vector<double> p{1.0, -2.0};
    AdamState st(2);
    const std::vector<double> g{0.0, 0.0};
    for (int i = 0; i < 5; ++i) mienf::nn::adam_step(p, g, st, 0.1);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == -2.0);
  }
  SUBCASE("first step moves by about lr against the gradient sign") {
    std::vector<double> p{1.0, 1.0};
    AdamState st(2);
    const std::vector<double> g{3.0, -0.5};
    mienf::nn::adam_step(p, g, st, 0.01);
    CHECK(p[0] == doctest::Approx(0.99).epsilon(1e-8));
    CHECK(p[1] == doctest::Approx(1.01).epsilon(1e-7));
  }
  SUBCASE("minimizes p squared") {
    std::vector<double> p{1.0};
    AdamState st(1);
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> g{2.0 * p[0]};
      mienf::nn::adam_step(p, g, st, 0.1);
    }
    CHECK(std::abs(p[0]) < 0.1);
  }
  SUBCASE("size mismatch is rejected") {
    std::vector<double> p{1.0};
    AdamState st(2);
    const std::vector<double> g{1.0};
    CHECK_THROWS_AS(mienf::nn::adam_step(p, g, st, 0.1), mienf::Error);
  }
}
