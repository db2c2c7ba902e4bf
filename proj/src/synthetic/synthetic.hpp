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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "numerics/matrix.hpp"

namespace mienf::synthetic {

using numerics::Matrix;
using numerics::Vector;

/// Joint samples (x_k, y_k) with an exactly known mutual information.
struct LabeledDatasetPair {
  Matrix x;
  Matrix y;
  double true_mi = 0.0;
  std::string family;
  std::string mapping = "identity";
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
};

// Splits `target` into `components` equal shares.
Vector allocate_equal(double target, std::size_t components);

// ρ = sqrt(1 − exp(−2 I)).
double correlation_from_mi(double mi);

/// d pairs (x_j, y_j) of standard bivariate normals with correlation ρ_j.
LabeledDatasetPair gen_correlated_gaussian(std::size_t dim, double target_mi, std::size_t n,
                                           std::uint64_t seed);
LabeledDatasetPair gen_correlated_gaussian(const Vector& allocation, std::size_t n, std::uint64_t seed);

enum class Mapping { kIdentity, kGaussianCdf, kAsinh, kAffineMix };

Mapping parse_mapping(const std::string& name);
std::string mapping_name(Mapping m);
// "a+b+c" → {a, b, c}, applied left to right.
std::vector<Mapping> parse_mapping_chain(const std::string& text);

/// Applies the same kind of map to x and y. Labels are carried over.
LabeledDatasetPair apply_mapping(LabeledDatasetPair pair, Mapping map, std::uint64_t seed);
LabeledDatasetPair apply_mapping(LabeledDatasetPair pair, const std::vector<Mapping>& chain,
                                 std::uint64_t seed);

// Random Q₁ diag(s) Q₂ with s ∈ [1, 10]; condition number ≤ 10.
Matrix random_well_conditioned(std::size_t dim, Rng& rng);

/// MI offset between a Student pair and its Gaussian core:
/// c = f(k) + f(k+n+m) − f(k+n) − f(k+m), f(x) = log Γ(x/2) − (x/2) ψ(x/2).
double student_correction(double dof, std::size_t dim_x, std::size_t dim_y);

/// Multivariate Student pair: Gaussian core with MI κ = target − c scaled by
/// a shared sqrt(k/U), U ~ χ²_k. Throws TargetBelowCorrection when κ ≤ 0.
LabeledDatasetPair gen_student(std::size_t dim_x, std::size_t dim_y, unsigned dof, double target_mi,
                               std::size_t n, std::uint64_t seed, bool asinh = false);
/// Same construction parametrized by the core MI κ ≥ 0 directly; the label is
/// κ + c, so κ = 0 yields an uncorrelated (but dependent) Student pair.
LabeledDatasetPair gen_student_kappa(std::size_t dim_x, std::size_t dim_y, unsigned dof, double kappa,
                                     std::size_t n, std::uint64_t seed);

/// X ~ U[0,1], Y = X + U[−ε, ε].
double smoothed_uniform_mi(double eps);
double smoothed_uniform_eps(double mi);
inline constexpr double kSmoothedUniformMinMi = 1e-4;

/// d independent smoothed-uniform pairs, each carrying target/d nats.
LabeledDatasetPair gen_smoothed_uniform(std::size_t dim, double target_mi, std::size_t n, std::uint64_t seed);

struct OracleSpec {
  std::string family;  // gaussian | student | smoothed_uniform
  std::size_t dim_x = 1;
  std::size_t dim_y = 1;
  double target_mi = 0.0;
  unsigned dof = 4;
};

struct OracleResult {
  double mi = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo mean of the analytic pointwise MI log p(x,y)/(p(x)p(y)).
/// For Student pairs a target equal to the correction means κ = 0.
OracleResult mc_pmi_oracle(const OracleSpec& spec, std::size_t n_mc, std::uint64_t seed);

/// Dataset CSV (header x_0.., y_0..) plus a metadata sidecar JSON.
std::string sidecar_path(const std::string& csv_path);
void write_dataset(const LabeledDatasetPair& pair, const std::string& csv_path);
LabeledDatasetPair read_dataset(const std::string& csv_path);
// Reads only the sample CSV; `dim_x` columns go to x. 0 splits by header names.
LabeledDatasetPair read_dataset_csv(const std::string& csv_path, std::size_t dim_x = 0);

}  // namespace mienf::synthetic
