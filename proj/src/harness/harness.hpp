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

#include "estimators/mienf.hpp"
#include "synthetic/synthetic.hpp"

namespace mienf::harness {

using numerics::Matrix;
using numerics::Vector;

/// Flat key/value settings. Section headers prefix keys: `[train]` then
/// `epochs = 10` yields "train.epochs".
using Settings = std::map<std::string, std::string>;

Settings parse_settings(const std::string& text);

struct ExperimentSpec {
  std::string family = "gaussian";  // gaussian | student | smoothed_uniform
  std::size_t dim_x = 1;
  std::size_t dim_y = 1;
  unsigned dof = 4;
  std::string mapping = "identity";  // chain such as "gaussian_cdf" or "affine_mix+asinh"
  std::string estimator = "closed_form";  // closed_form | ksg | tridiag_mienf | full_mienf
  std::size_t ksg_k = 3;
  std::size_t samples = 10000;
  double mi_start = 0.0;
  double mi_stop = 0.0;
  std::size_t mi_steps = 1;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  std::string output;
  estimators::TrainConfig train;

  void validate() const;
  Vector grid() const;
};

// Applies one setting; throws ParseError for unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
ExperimentSpec spec_from_settings(const Settings& settings);
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

std::vector<std::string> estimator_names();

struct EstimatorOptions {
  estimators::TrainConfig train;
  std::size_t ksg_k = 3;
  std::uint64_t seed = 0;
};

/// Dispatches to a registered estimator. Closed-form and KSG reports carry
/// only the point estimate (CI collapsed onto it).
estimators::EstimationReport run_estimator(const std::string& name, const Matrix& x, const Matrix& y,
                                           const EstimatorOptions& options);

/// Generates the experiment's family at `target_mi` and applies its mapping chain.
synthetic::LabeledDatasetPair make_dataset(const ExperimentSpec& spec, double target_mi, std::uint64_t seed);

struct SweepRow {
  double true_mi = 0.0;
  std::size_t repeat = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double seconds = 0.0;
  std::string error;  // empty on success; estimate is NaN otherwise
};

struct PointSummary {
  double true_mi = 0.0;
  std::size_t count = 0;  // successful rows
  double mean = 0.0;
  double std = 0.0;  // unbiased
  double ci_half_width = 0.0;
  double rmse = 0.0;
};

struct Summary {
  double confidence = 0.95;
  std::vector<PointSummary> points;
  double rmse = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  Summary summary;
  std::size_t error_count() const;
};

SweepResult run_experiment(const ExperimentSpec& spec, std::size_t jobs = 1);

/// Groups rows by true_mi in order of first appearance.
Summary aggregate(const std::vector<SweepRow>& rows, double confidence);

enum class Format { kCsv, kJson };
Format parse_format(const std::string& name);

std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text, double confidence = 0.95);
SweepResult sweep_from_json(const std::string& text);
void emit(const SweepResult& result, Format format, const std::string& path);

}  // namespace mienf::harness
