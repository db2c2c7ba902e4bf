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

#include "synthetic/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "numerics/special.hpp"

namespace mienf::synthetic {

namespace {

using numerics::kPi;

// One Gaussian pair per component: x = a, y = ρ a + e^{−I} b, since
// sqrt(1 − ρ²) = e^{−I}.
void fill_gaussian_core(const Vector& allocation, std::size_t dim_x, std::size_t dim_y, std::size_t n,
                        Rng& rng, Matrix& x, Matrix& y) {
  std::normal_distribution<double> normal;
  x = Matrix(n, dim_x);
  y = Matrix(n, dim_y);
  const std::size_t paired = allocation.size();
  Vector rho(paired), tail(paired);
  for (std::size_t j = 0; j < paired; ++j) {
    rho[j] = correlation_from_mi(allocation[j]);
    tail[j] = std::exp(-allocation[j]);
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < paired; ++j) {
      const double a = normal(rng);
      const double b = normal(rng);
      x(r, j) = a;
      y(r, j) = rho[j] * a + tail[j] * b;
    }
    for (std::size_t j = paired; j < dim_x; ++j) x(r, j) = normal(rng);
    for (std::size_t j = paired; j < dim_y; ++j) y(r, j) = normal(rng);
  }
}

void check_allocation(const Vector& allocation) {
  for (double v : allocation)
    require(v >= 0.0 && std::isfinite(v), ErrorCode::kInvalidArgument,
            "allocation: per-component MI must be finite and nonnegative");
}

double chi_square(unsigned dof, Rng& rng) {
  std::normal_distribution<double> normal;
  double u = 0.0;
  for (unsigned i = 0; i < dof; ++i) {
    const double g = normal(rng);
    u += g * g;
  }
  return u;
}

double student_f(double x) { return numerics::log_gamma(0.5 * x) - 0.5 * x * numerics::digamma(0.5 * x); }

// log density of a p-variate Student t with identity-normalized quadratic form q
// and log det of the scale matrix `logdet`.
double student_log_density(double q, double p, double dof, double logdet) {
  return numerics::log_gamma(0.5 * (dof + p)) - numerics::log_gamma(0.5 * dof) -
         0.5 * p * std::log(dof * kPi) - 0.5 * logdet - 0.5 * (dof + p) * std::log1p(q / dof);
}

void map_matrix(Matrix& m, Mapping map, Rng& rng) {
  switch (map) {
    case Mapping::kIdentity:
      return;
    case Mapping::kGaussianCdf:
      for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = numerics::std_normal_cdf(m.data()[i]);
      return;
    case Mapping::kAsinh:
      for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std::asinh(m.data()[i]);
      return;
    case Mapping::kAffineMix: {
      const Matrix a = random_well_conditioned(m.cols(), rng);
      numerics::EigenRowMatrix mixed = m.map() * a.map().transpose();
      m.map() = mixed;
      for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std::asinh(m.data()[i]);
      return;
    }
  }
}

}  // namespace

Vector allocate_equal(double target, std::size_t components) {
  require(components > 0, ErrorCode::kInvalidArgument, "allocate_equal: no components");
  require(target >= 0.0 && std::isfinite(target), ErrorCode::kInvalidArgument,
          "allocate_equal: target MI must be finite and nonnegative");
  return Vector(components, target / static_cast<double>(components));
}

double correlation_from_mi(double mi) { return std::sqrt(-std::expm1(-2.0 * mi)); }

LabeledDatasetPair gen_correlated_gaussian(std::size_t dim, double target_mi, std::size_t n,
                                           std::uint64_t seed) {
  LabeledDatasetPair out = gen_correlated_gaussian(allocate_equal(target_mi, dim), n, seed);
  out.true_mi = target_mi;
  return out;
}

LabeledDatasetPair gen_correlated_gaussian(const Vector& allocation, std::size_t n, std::uint64_t seed) {
  require(!allocation.empty(), ErrorCode::kInvalidArgument, "gen_correlated_gaussian: empty allocation");
  check_allocation(allocation);
  const std::size_t d = allocation.size();
  LabeledDatasetPair out;
  Rng rng = make_rng(seed, streams::kData);
  fill_gaussian_core(allocation, d, d, n, rng, out.x, out.y);
  out.true_mi = std::accumulate(allocation.begin(), allocation.end(), 0.0);
  out.family = "gaussian";
  out.params = {{"dim", static_cast<double>(d)}};
  out.seed = seed;
  return out;
}

Mapping parse_mapping(const std::string& name) {
  if (name == "identity") return Mapping::kIdentity;
  if (name == "gaussian_cdf" || name == "cdf") return Mapping::kGaussianCdf;
  if (name == "asinh") return Mapping::kAsinh;
  if (name == "affine_mix") return Mapping::kAffineMix;
  raise(ErrorCode::kInvalidArgument, "unknown mapping '" + name + "'");
}

std::string mapping_name(Mapping m) {
  switch (m) {
    case Mapping::kIdentity: return "identity";
    case Mapping::kGaussianCdf: return "gaussian_cdf";
    case Mapping::kAsinh: return "asinh";
    case Mapping::kAffineMix: return "affine_mix";
  }
  return "identity";
}

std::vector<Mapping> parse_mapping_chain(const std::string& text) {
  std::vector<Mapping> chain;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '+')) {
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    chain.push_back(parse_mapping(part));
  }
  require(!chain.empty(), ErrorCode::kInvalidArgument, "empty mapping chain");
  return chain;
}

Matrix random_well_conditioned(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto orthogonal = [&] {
    Matrix q(dim, dim);
    for (std::size_t i = 0; i < q.size(); ++i) q.data()[i] = normal(rng);
    // Modified Gram-Schmidt on columns.
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t k = 0; k < c; ++k) {
        double dot = 0.0;
        for (std::size_t r = 0; r < dim; ++r) dot += q(r, k) * q(r, c);
        for (std::size_t r = 0; r < dim; ++r) q(r, c) -= dot * q(r, k);
      }
      double norm = 0.0;
      for (std::size_t r = 0; r < dim; ++r) norm += q(r, c) * q(r, c);
      norm = std::sqrt(norm);
      for (std::size_t r = 0; r < dim; ++r) q(r, c) /= norm;
    }
    return q;
  };
  const Matrix q1 = orthogonal();
  const Matrix q2 = orthogonal();
  Vector s(dim);
  for (double& v : s) v = std::pow(10.0, unit(rng));
  return q1 * Matrix::diagonal(s) * q2;
}

LabeledDatasetPair apply_mapping(LabeledDatasetPair pair, Mapping map, std::uint64_t seed) {
  return apply_mapping(std::move(pair), std::vector<Mapping>{map}, seed);
}

LabeledDatasetPair apply_mapping(LabeledDatasetPair pair, const std::vector<Mapping>& chain,
                                 std::uint64_t seed) {
  Rng rng = make_rng(seed, streams::kMapping);
  std::string name;
  for (Mapping m : chain) {
    map_matrix(pair.x, m, rng);
    map_matrix(pair.y, m, rng);
    if (m == Mapping::kIdentity) continue;
    if (pair.mapping != "identity" || !name.empty()) name += "+";
    name += mapping_name(m);
  }
  if (!name.empty()) pair.mapping = pair.mapping == "identity" ? name : pair.mapping + name;
  return pair;
}

double student_correction(double dof, std::size_t dim_x, std::size_t dim_y) {
  if (!(dof >= 1.0) || !std::isfinite(dof) || dim_x == 0 || dim_y == 0)
    raise(ErrorCode::kDomainError, "student_correction: need dof >= 1 and positive dimensions");
  const double n = static_cast<double>(dim_x);
  const double m = static_cast<double>(dim_y);
  return student_f(dof) + student_f(dof + n + m) - student_f(dof + n) - student_f(dof + m);
}

LabeledDatasetPair gen_student_kappa(std::size_t dim_x, std::size_t dim_y, unsigned dof, double kappa,
                                     std::size_t n, std::uint64_t seed) {
  require(dim_x > 0 && dim_y > 0, ErrorCode::kInvalidArgument, "gen_student: empty component");
  require(kappa >= 0.0 && std::isfinite(kappa), ErrorCode::kInvalidArgument,
          "gen_student: core MI must be finite and nonnegative");
  const double c = student_correction(dof, dim_x, dim_y);
  LabeledDatasetPair out;
  Rng rng = make_rng(seed, streams::kData);
  fill_gaussian_core(allocate_equal(kappa, std::min(dim_x, dim_y)), dim_x, dim_y, n, rng, out.x, out.y);
  for (std::size_t r = 0; r < n; ++r) {
    const double s = std::sqrt(static_cast<double>(dof) / chi_square(dof, rng));
    for (double& v : out.x.row(r)) v *= s;
    for (double& v : out.y.row(r)) v *= s;
  }
  out.true_mi = kappa + c;
  out.family = "student";
  out.params = {{"dim_x", static_cast<double>(dim_x)}, {"dim_y", static_cast<double>(dim_y)},
                {"dof", static_cast<double>(dof)}, {"kappa", kappa}};
  out.seed = seed;
  return out;
}

LabeledDatasetPair gen_student(std::size_t dim_x, std::size_t dim_y, unsigned dof, double target_mi,
                               std::size_t n, std::uint64_t seed, bool asinh) {
  require(dim_x > 0 && dim_y > 0, ErrorCode::kInvalidArgument, "gen_student: empty component");
  const double c = student_correction(dof, dim_x, dim_y);
  const double kappa = target_mi - c;
  require(kappa > 0.0, ErrorCode::kTargetBelowCorrection,
          "gen_student: target MI must exceed the Student correction " + std::to_string(c));
  LabeledDatasetPair out = gen_student_kappa(dim_x, dim_y, dof, kappa, n, seed);
  // Keep the requested label bit-exact.
  out.true_mi = target_mi;
  if (asinh) out = apply_mapping(std::move(out), Mapping::kAsinh, seed);
  return out;
}

double smoothed_uniform_mi(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) raise(ErrorCode::kDomainError, "smoothed_uniform_mi: need eps > 0");
  return eps < 0.5 ? eps - std::log(2.0 * eps) : 0.25 / eps;
}

double smoothed_uniform_eps(double mi) {
  if (!(mi > 0.0) || !std::isfinite(mi)) raise(ErrorCode::kDomainError, "smoothed_uniform_eps: need mi > 0");
  if (mi <= 0.5) return 0.25 / mi;
  return -numerics::lambert_w0(-0.5 * std::exp(-mi));
}

LabeledDatasetPair gen_smoothed_uniform(std::size_t dim, double target_mi, std::size_t n, std::uint64_t seed) {
  require(dim > 0, ErrorCode::kInvalidArgument, "gen_smoothed_uniform: empty component");
  require(target_mi >= 0.0 && std::isfinite(target_mi), ErrorCode::kInvalidArgument,
          "gen_smoothed_uniform: target MI must be finite and nonnegative");
  const double per = std::max(target_mi / static_cast<double>(dim), kSmoothedUniformMinMi);
  const double eps = smoothed_uniform_eps(per);
  LabeledDatasetPair out;
  out.x = Matrix(n, dim);
  out.y = Matrix(n, dim);
  Rng rng = make_rng(seed, streams::kData);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> noise(-eps, eps);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < dim; ++j) {
      const double x = unit(rng);
      out.x(r, j) = x;
      out.y(r, j) = x + noise(rng);
    }
  out.true_mi = smoothed_uniform_mi(eps) * static_cast<double>(dim);
  out.family = "smoothed_uniform";
  out.params = {{"dim", static_cast<double>(dim)}, {"eps", eps}};
  out.seed = seed;
  return out;
}

OracleResult mc_pmi_oracle(const OracleSpec& spec, std::size_t n_mc, std::uint64_t seed) {
  require(n_mc >= 2, ErrorCode::kInsufficientSamples, "mc_pmi_oracle: need at least two samples");
  require(spec.dim_x > 0 && spec.dim_y > 0, ErrorCode::kInvalidArgument, "mc_pmi_oracle: empty component");
  Rng rng = make_rng(seed, streams::kOracle);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::function<double()> draw;

  const std::size_t paired = std::min(spec.dim_x, spec.dim_y);
  Vector rho, one_minus_rho2;
  auto core_setup = [&](double core_mi) {
    for (double share : allocate_equal(core_mi, paired)) {
      rho.push_back(correlation_from_mi(share));
      one_minus_rho2.push_back(std::exp(-2.0 * share));
    }
  };
  double logdet = 0.0;

  // Each draw returns one PMI value.
  if (spec.family == "gaussian") {
    core_setup(spec.target_mi);
    draw = [&] {
      double pmi = 0.0;
      for (std::size_t j = 0; j < paired; ++j) {
        const double a = normal(rng);
        const double b = rho[j] * a + std::sqrt(one_minus_rho2[j]) * normal(rng);
        const double q = (a * a - 2.0 * rho[j] * a * b + b * b) / one_minus_rho2[j];
        pmi += -0.5 * std::log(one_minus_rho2[j]) - 0.5 * q + 0.5 * (a * a + b * b);
      }
      // Unpaired components are independent and contribute nothing.
      return pmi;
    };
  } else if (spec.family == "student") {
    const double k = static_cast<double>(spec.dof);
    double kappa = spec.target_mi - student_correction(k, spec.dim_x, spec.dim_y);
    // Rounding slack so target = c selects the uncorrelated core.
    if (kappa < 0.0 && kappa > -1e-12) kappa = 0.0;
    require(kappa >= 0.0, ErrorCode::kTargetBelowCorrection, "mc_pmi_oracle: target below Student correction");
    core_setup(kappa);
    for (double v : one_minus_rho2) logdet += std::log(v);
    const double dx = static_cast<double>(spec.dim_x);
    const double dy = static_cast<double>(spec.dim_y);
    draw = [&, k, dx, dy] {
      const double s2 = k / chi_square(spec.dof, rng);
      double q = 0.0, qx = 0.0, qy = 0.0;
      for (std::size_t j = 0; j < paired; ++j) {
        const double a = normal(rng);
        const double b = rho[j] * a + std::sqrt(one_minus_rho2[j]) * normal(rng);
        q += (a * a - 2.0 * rho[j] * a * b + b * b) / one_minus_rho2[j];
        qx += a * a;
        qy += b * b;
      }
      for (std::size_t j = paired; j < spec.dim_x; ++j) {
        const double a = normal(rng);
        q += a * a;
        qx += a * a;
      }
      for (std::size_t j = paired; j < spec.dim_y; ++j) {
        const double b = normal(rng);
        q += b * b;
        qy += b * b;
      }
      return student_log_density(s2 * q, dx + dy, k, logdet) - student_log_density(s2 * qx, dx, k, 0.0) -
             student_log_density(s2 * qy, dy, k, 0.0);
    };
  } else if (spec.family == "smoothed_uniform") {
    require(spec.dim_x == spec.dim_y, ErrorCode::kInvalidArgument,
            "mc_pmi_oracle: smoothed uniform needs equal dimensions");
    const double per = std::max(spec.target_mi / static_cast<double>(spec.dim_x), kSmoothedUniformMinMi);
    const double eps = smoothed_uniform_eps(per);
    draw = [&, eps] {
      double pmi = 0.0;
      for (std::size_t j = 0; j < spec.dim_x; ++j) {
        const double x = unit(rng);
        const double y = x + eps * (2.0 * unit(rng) - 1.0);
        // p(y | x) = 1/(2ε) and p(y) = |[0,1] ∩ [y−ε, y+ε]| / (2ε).
        const double overlap = std::min(1.0, y + eps) - std::max(0.0, y - eps);
        pmi -= std::log(overlap);
      }
      return pmi;
    };
  } else {
    raise(ErrorCode::kUnsupportedFamily, "mc_pmi_oracle: unsupported family '" + spec.family + "'");
  }

  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double v = draw();
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  OracleResult out;
  out.mi = mean;
  out.standard_error = std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
  out.samples = n_mc;
  return out;
}

}  // namespace mienf::synthetic
