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

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "base/full_gaussian.hpp"
#include "base/tridiag.hpp"
#include "flows/flow.hpp"
#include "nn/adam.hpp"
#include "numerics/matrix.hpp"

namespace mienf::estimators {

using numerics::Matrix;
using numerics::Vector;

enum class Preprocess { kStandardize, kCca };

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t batch_size = 512;
  double lr_init = 5e-4;
  double lr_final = 1e-5;
  bool cosine_decay = true;
  std::uint64_t seed = 0;
  double ema_gamma = 0.1;
  flows::FlowConfig flow;
  std::size_t trace_stride = 1;
  // Point estimate = mean of the per-epoch estimates over the last K epochs.
  std::size_t average_last = 50;
  double ci_level = 0.95;
  // Fraction of rows held out from training and used only for evaluation.
  double holdout_fraction = 0.0;
  Preprocess preprocess = Preprocess::kStandardize;
  // Start the tridiagonal base from the per-pair correlations of the
  // preprocessed data instead of w = log 0.01.
  bool data_init = true;

  void validate() const;
  double learning_rate(std::size_t epoch, std::size_t step, std::size_t steps_per_epoch) const;
};

struct TracePoint {
  std::size_t epoch = 0;
  double loglik = 0.0;   // mean training log-likelihood over the epoch
  double estimate = 0.0;
};

struct EstimationReport {
  std::string estimator;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.95;
  std::size_t averaged_epochs = 0;
  double final_estimate = 0.0;
  double final_loglik = 0.0;
  double holdout_loglik = 0.0;  // NaN when no holdout was requested
  double kld_lower_bound = 0.0;
  std::size_t samples = 0;
  std::size_t epochs = 0;
  double seconds = 0.0;
  Vector component_mi;  // per-pair MI of the tridiagonal base (empty otherwise)
  std::vector<TracePoint> trace;

  std::string to_json() const;
  static EstimationReport from_json(const std::string& text);
  void write_trace_csv(std::ostream& out) const;
};

/// Shared training loop for the tridiagonal and full-Gaussian variants.
class MienfTrainer {
 public:
  enum class Kind { kTridiag, kFull };

  MienfTrainer(const Matrix& x, const Matrix& y, const TrainConfig& cfg, Kind kind);

  Kind kind() const noexcept { return kind_; }
  const flows::ProductFlow& flows() const noexcept { return flows_; }
  const base::TridiagGaussianBase& tridiag_base() const noexcept { return tridiag_; }
  const base::FullGaussianBase& full_base() const noexcept { return full_; }

  // One pass over the shuffled training rows.
  TracePoint run_epoch();
  std::size_t epochs_done() const noexcept { return epoch_; }

  // Estimate from the current state: Σ e^w for the tridiagonal base, the
  // Gaussian closed form on the EMA moments for the full base.
  double running_estimate() const;
  // Gaussian closed form on the exact moments of all training latents.
  double latent_moment_estimate() const;

  // Mean of log q(z) + log|det J| over the given rows.
  double mean_loglik(const Matrix& x, const Matrix& y) const;

  EstimationReport fit();

 private:
  Matrix joint_latent(const Matrix& x, const Matrix& y, Vector* logdet) const;

  Kind kind_;
  TrainConfig cfg_;
  Matrix x_train_, y_train_, x_hold_, y_hold_;
  flows::ProductFlow flows_;
  base::TridiagGaussianBase tridiag_;
  base::FullGaussianBase full_;
  nn::AdamState adam_x_, adam_y_, adam_w_;
  Rng shuffle_rng_;
  std::size_t epoch_ = 0;
};

EstimationReport fit_tridiag_mienf(const Matrix& x, const Matrix& y, const TrainConfig& cfg);
EstimationReport fit_full_mienf(const Matrix& x, const Matrix& y, const TrainConfig& cfg);

/// max(0, −mean log q(z) − h(N(m̂, Σ̂))) with m̂, Σ̂ the batch moments;
/// `log_q` holds log q(z_k) for each row.
double kld_lower_bound(const Matrix& latent, std::span<const double> log_q);
double kld_lower_bound(const Matrix& latent, const base::TridiagGaussianBase& base);
double kld_lower_bound(const Matrix& latent, const base::FullGaussianBase& base);

}  // namespace mienf::estimators
