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
#include <numeric>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "doctest.h"
#include "estimators/gaussian.hpp"
#include "estimators/ksg.hpp"
#include "estimators/mienf.hpp"
#include "helpers.hpp"
#include "synthetic/synthetic.hpp"

using namespace mienf::estimators;
using mienf::numerics::Matrix;
using mienf::numerics::Vector;

namespace {

// Bivariate normal pairs with correlation rho, n rows of (x, y).
std::pair<Matrix, Matrix> correlated_pairs(std::size_t dim, double rho, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Matrix x(n, dim), y(n, dim);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const double a = g(gen), b = g(gen);
      x(r, c) = a;
      y(r, c) = rho * a + std::sqrt(1.0 - rho * rho) * b;
    }
  return {x, y};
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.average_last = std::min<std::size_t>(10, epochs);
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("gaussian MI from a covariance") {
  const Matrix s{{1.0, 0.5}, {0.5, 1.0}};
  CHECK(gaussian_mi_from_covariance(s, 1) == doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-14));
  CHECK(-0.5 * std::log(0.75) == doctest::Approx(0.143841).epsilon(1e-6));
  std::mt19937_64 gen(1);
  const Matrix r = testing::random_spd(5, gen);
  CHECK(gaussian_mi_from_covariance(r, 2) == doctest::Approx(oracle::gaussian_mi(testing::to_dense(r), 2)).epsilon(1e-11));
  CHECK_THROWS_AS(gaussian_mi_from_covariance(r, 0), mienf::Error);
}

TEST_CASE("closed-form estimator") {
  SUBCASE("independent data") {
    auto [x, y] = correlated_pairs(2, 0.0, 100000, 2);
    CHECK(estimate_gaussian_closed_form(x, y) < 0.05);
  }
  SUBCASE("correlation 0.5") {
    auto [x, y] = correlated_pairs(1, 0.5, 400000, 3);
    CHECK(estimate_gaussian_closed_form(x, y) == doctest::Approx(0.143841).epsilon(0.01 / 0.143841));
  }
  SUBCASE("affine invariance") {
    auto [x, y] = correlated_pairs(3, 0.7, 2000, 4);
    std::mt19937_64 gen(5);
    const Matrix ax = testing::random_spd(3, gen), ay = testing::gaussian_matrix(3, 3, gen);
    Matrix tx = x * ax, ty = y * ay;
    for (std::size_t r = 0; r < tx.rows(); ++r) {
      tx(r, 0) += 10.0;
      ty(r, 2) -= 3.0;
    }
    CHECK(estimate_gaussian_closed_form(tx, ty) == doctest::Approx(estimate_gaussian_closed_form(x, y)).epsilon(1e-10));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_gaussian_closed_form(Matrix(3, 2), Matrix(3, 2)), mienf::Error);
    CHECK_THROWS_AS(estimate_gaussian_closed_form(Matrix(10, 1), Matrix(9, 1)), mienf::Error);
  }
}

TEST_CASE("canonical correlation analysis") {
  SUBCASE("whitened independent data") {
    auto [x, y] = correlated_pairs(3, 0.0, 50000, 6);
    const auto cca = cca_tridiagonalize(x, y);
    for (double r : cca.rho) CHECK(r < 0.03);
    const Matrix gram = cca.map_x * cca.map_x.transpose();
    CHECK(testing::max_abs_diff(gram, Matrix::identity(3)) < 0.05);
  }
  SUBCASE("canonical correlations match the dense oracle") {
    std::mt19937_64 gen(7);
    const Matrix mix = testing::gaussian_matrix(4, 4, gen);
    const Matrix z = testing::gaussian_matrix(5000, 4, gen) * mix;
    const Matrix x = z.col_block(0, 2), y = z.col_block(2, 2);
    const auto cca = cca_tridiagonalize(x, y);
    // Singular values of Σxx^{-1/2} Σxy Σyy^{-1/2} are square roots of the
    // eigenvalues of Σxx⁻¹ Σxy Σyy⁻¹ Σyx (2×2 closed form).
    const auto s = testing::to_dense(mienf::numerics::covariance(z));
    oracle::Dense sxx{{s[0][0], s[0][1]}, {s[1][0], s[1][1]}}, syy{{s[2][2], s[2][3]}, {s[3][2], s[3][3]}};
    oracle::Dense sxy{{s[0][2], s[0][3]}, {s[1][2], s[1][3]}};
    const auto m = oracle::matmul(oracle::matmul(oracle::inverse(sxx), sxy),
                                  oracle::matmul(oracle::inverse(syy), oracle::transpose(sxy)));
    const double tr = m[0][0] + m[1][1], det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    CHECK(cca.rho[0] == doctest::Approx(std::sqrt(tr / 2.0 + disc)).epsilon(1e-8));
    CHECK(cca.rho[1] == doctest::Approx(std::sqrt(tr / 2.0 - disc)).epsilon(1e-8));
    CHECK(cca.mutual_information() == doctest::Approx(estimate_gaussian_closed_form(x, y)).epsilon(1e-8));

    // The mapped data has identity marginal blocks and diagonal cross block.
    const Matrix joint = mienf::numerics::hconcat(cca.apply_x(x), cca.apply_y(y));
    const Matrix c = mienf::numerics::covariance(joint);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        double expected = i == j ? 1.0 : 0.0;
        if (j == i + 2) expected = cca.rho[i];
        if (i == j + 2) expected = cca.rho[j];
        CHECK(c(i, j) == doctest::Approx(expected).epsilon(1e-8).scale(1.0));
      }
    CHECK(testing::max_abs_diff(cca.map_x * cca.inverse_map_x, Matrix::identity(2)) < 1e-10);
  }
  SUBCASE("unequal dimensions") {
    std::mt19937_64 gen(8);
    const Matrix z = testing::gaussian_matrix(3000, 5, gen) * testing::gaussian_matrix(5, 5, gen);
    const auto cca = cca_tridiagonalize(z.col_block(0, 3), z.col_block(3, 2));
    CHECK(cca.rho.size() == 2);
    CHECK(cca.mutual_information() ==
          doctest::Approx(estimate_gaussian_closed_form(z.col_block(0, 3), z.col_block(3, 2))).epsilon(1e-8));
  }
}

TEST_CASE("KSG estimator") {
  SUBCASE("matches the brute-force reference without jitter") {
    auto [x, y] = correlated_pairs(2, 0.6, 300, 9);
    KsgOptions opt;
    opt.jitter = 0.0;
    CHECK(estimate_ksg(x, y, opt) == doctest::Approx(oracle::ksg(testing::to_dense(x), testing::to_dense(y), 3)).epsilon(1e-8));
    opt.k = 5;
    CHECK(estimate_ksg(x, y, opt) == doctest::Approx(oracle::ksg(testing::to_dense(x), testing::to_dense(y), 5)).epsilon(1e-8));
  }
  SUBCASE("independent uniforms") {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u;
    Matrix x(10000, 1), y(10000, 1);
    for (std::size_t r = 0; r < 10000; ++r) {
      x(r, 0) = u(gen);
      y(r, 0) = u(gen);
    }
    CHECK(std::abs(estimate_ksg(x, y)) < 0.05);
  }
  SUBCASE("bivariate normal with correlation 0.9") {
    auto [x, y] = correlated_pairs(1, 0.9, 10000, 11);
    CHECK(estimate_ksg(x, y) == doctest::Approx(-0.5 * std::log(1.0 - 0.81)).epsilon(0.05 / 0.8304));
  }
  SUBCASE("permutation invariance and threading") {
    auto [x, y] = correlated_pairs(2, 0.5, 800, 12);
    std::vector<std::size_t> perm(800);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(13));
    KsgOptions opt;
    opt.jitter = 0.0;
    const double base = estimate_ksg(x, y, opt);
    CHECK(estimate_ksg(x.select_rows(perm), y.select_rows(perm), opt) == doctest::Approx(base).epsilon(1e-12));
    opt.threads = 3;
    CHECK(estimate_ksg(x, y, opt) == base);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(estimate_ksg(Matrix(3, 1), Matrix(3, 1)), mienf::Error);
    KsgOptions opt;
    opt.k = 0;
    CHECK_THROWS_AS(estimate_ksg(Matrix(30, 1), Matrix(30, 1), opt), mienf::Error);
  }
}

TEST_CASE("KL lower bound") {
  std::mt19937_64 gen(14);
  const Matrix z = testing::gaussian_matrix(50000, 1, gen);
  SUBCASE("exact moments give zero") {
    const mienf::base::FullGaussianBase fitted(mienf::numerics::column_means(z), mienf::numerics::covariance(z));
    CHECK(kld_lower_bound(z, fitted) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
  SUBCASE("wrong variance") {
    const mienf::base::FullGaussianBase wide(Vector{0.0}, Matrix{{2.0}});
    double m = 0.0, sq = 0.0;
    for (double v : z.values()) {
      m += v;
      sq += v * v;
    }
    const double n = 50000.0;
    m /= n;
    const double var = sq / n - m * m;
    const double cross = 0.5 * std::log(2.0 * std::numbers::pi * 2.0) + sq / n / 4.0;
    const double entropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * var);
    CHECK(kld_lower_bound(z, wide) == doctest::Approx(cross - entropy).epsilon(1e-10));
    CHECK(kld_lower_bound(z, wide) == doctest::Approx(0.5 * (std::log(2.0) - 0.5)).epsilon(0.02));
  }
  SUBCASE("nonnegative") {
    Vector log_q(z.rows(), 10.0);
    CHECK(kld_lower_bound(z, log_q) == 0.0);
  }
}

TEST_CASE("training configuration") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.learning_rate(0, 0, 10) == doctest::Approx(cfg.lr_init));
  CHECK(cfg.learning_rate(cfg.epochs, 0, 10) == doctest::Approx(cfg.lr_final));
  CHECK(cfg.learning_rate(cfg.epochs / 2, 0, 10) == doctest::Approx(0.5 * (cfg.lr_init + cfg.lr_final)));
  cfg.cosine_decay = false;
  CHECK(cfg.learning_rate(cfg.epochs / 2, 3, 10) == cfg.lr_init);
  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), mienf::Error);
  bad = TrainConfig{};
  bad.holdout_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), mienf::Error);
  bad = TrainConfig{};
  bad.ci_level = 1.5;
  CHECK_THROWS_AS(bad.validate(), mienf::Error);
}

TEST_CASE("trainer at initialization reproduces the closed form") {
  auto [x, y] = correlated_pairs(3, 0.8, 3000, 15);
  for (auto pre : {Preprocess::kStandardize, Preprocess::kCca}) {
    TrainConfig cfg = quick_config(1);
    cfg.preprocess = pre;
    const MienfTrainer full(x, y, cfg, MienfTrainer::Kind::kFull);
    CHECK(full.latent_moment_estimate() == doctest::Approx(estimate_gaussian_closed_form(x, y)).epsilon(1e-10));
    CHECK(full.running_estimate() == doctest::Approx(estimate_gaussian_closed_form(x, y)).epsilon(1e-10));
  }
  TrainConfig cfg = quick_config(1);
  cfg.preprocess = Preprocess::kCca;
  const MienfTrainer tri(x, y, cfg, MienfTrainer::Kind::kTridiag);
  CHECK(tri.running_estimate() == doctest::Approx(estimate_gaussian_closed_form(x, y)).epsilon(1e-8));
}

TEST_CASE("sample-size and shape checks") {
  auto [x, y] = correlated_pairs(4, 0.5, 50, 16);
  CHECK_THROWS_AS(fit_tridiag_mienf(x, y, quick_config(1)), mienf::Error);
  try {
    fit_full_mienf(x, y, quick_config(1));
  } catch (const mienf::Error& e) {
    CHECK(e.code() == mienf::ErrorCode::kInsufficientSamples);
  }
  auto [x2, y2] = correlated_pairs(1, 0.5, 100, 17);
  CHECK_THROWS_AS(fit_tridiag_mienf(x2, y2.block(0, 0, 99, 1), quick_config(1)), mienf::Error);
}

TEST_CASE("flow estimators on independent data") {
  auto [x, y] = correlated_pairs(4, 0.0, 10000, 18);
  const auto tri = fit_tridiag_mienf(x, y, quick_config(20));
  const auto full = fit_full_mienf(x, y, quick_config(20));
  CHECK(tri.point <= 0.1);
  CHECK(full.point <= 0.1);
  CHECK(tri.point >= 0.0);
  CHECK(full.point >= 0.0);
}

TEST_CASE("flow estimators on an 8+8 Gaussian with 5 nats") {
  const auto data = mienf::synthetic::gen_correlated_gaussian(8, 5.0, 10000, 19);
  const auto tri = fit_tridiag_mienf(data.x, data.y, quick_config(20));
  const auto full = fit_full_mienf(data.x, data.y, quick_config(20));
  CHECK(tri.point == doctest::Approx(5.0).epsilon(0.1));
  CHECK(full.point == doctest::Approx(5.0).epsilon(0.1));
  CHECK(tri.ci_low <= tri.point);
  CHECK(tri.ci_high >= tri.point);
  CHECK(tri.trace.size() == 20);
  CHECK(tri.component_mi.size() == 8);
  double sum = 0.0;
  for (double v : tri.component_mi) sum += v;
  CHECK(sum == doctest::Approx(tri.final_estimate).epsilon(1e-12));
  CHECK(full.component_mi.empty());
  CHECK(std::isnan(tri.holdout_loglik));
  CHECK(tri.kld_lower_bound >= 0.0);
}

TEST_CASE("training is deterministic and honours the holdout split") {
  const auto data = mienf::synthetic::gen_correlated_gaussian(2, 1.0, 2000, 20);
  TrainConfig cfg = quick_config(3);
  cfg.holdout_fraction = 0.2;
  const auto a = fit_tridiag_mienf(data.x, data.y, cfg);
  const auto b = fit_tridiag_mienf(data.x, data.y, cfg);
  CHECK(a.point == b.point);
  CHECK(a.final_loglik == b.final_loglik);
  CHECK(std::isfinite(a.holdout_loglik));
  CHECK(a.samples == 2000);
  cfg.seed = 4;
  CHECK(fit_tridiag_mienf(data.x, data.y, cfg).point != a.point);
}

TEST_CASE("estimation report serialization") {
  EstimationReport r;
  r.estimator = "tridiag_mienf";
  r.point = 1.0 / 3.0;
  r.ci_low = 0.1;
  r.ci_high = 0.7;
  r.holdout_loglik = std::nan("");
  r.component_mi = {0.25, 1e-300};
  r.trace = {{1, -3.5, 0.2}, {2, -3.25, 1.0 / 7.0}};
  const auto back = EstimationReport::from_json(r.to_json());
  CHECK(back.point == r.point);
  CHECK(back.component_mi == r.component_mi);
  CHECK(std::isnan(back.holdout_loglik));
  REQUIRE(back.trace.size() == 2);
  CHECK(back.trace[1].estimate == r.trace[1].estimate);
  std::ostringstream csv;
  r.write_trace_csv(csv);
  CHECK(csv.str().rfind("epoch,loglik,estimate\n", 0) == 0);
  CHECK(csv.str().find("2,-3.25,0.14285714285714285") != std::string::npos);
  CHECK_THROWS_AS(EstimationReport::from_json("[1,2"), mienf::Error);
}
