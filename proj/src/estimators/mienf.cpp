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

#include "estimators/mienf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "estimators/gaussian.hpp"
#include "numerics/linalg.hpp"
#include "numerics/special.hpp"

namespace mienf::estimators {

namespace {

using flows::CompositeFlow;
using flows::Layer;

constexpr double kMinInitMi = 1e-3;

CompositeFlow with_preprocessing(Layer pre, const Matrix& data, const flows::FlowConfig& cfg, Rng& rng) {
  flows::FlowConfig body = cfg;
  body.standardize = false;
  CompositeFlow rest = CompositeFlow::make_default(data, body, rng);
  std::vector<Layer> layers;
  layers.reserve(rest.layers().size() + 1);
  layers.push_back(std::move(pre));
  for (const auto& l : rest.layers()) layers.push_back(l);
  return CompositeFlow(data.cols(), std::move(layers));
}

Matrix apply_fixed(const Layer& layer, const Matrix& data) {
  Matrix out = data;
  Vector ld(data.rows(), 0.0);
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, flows::Standardize> || std::is_same_v<T, flows::FixedAffine>)
          l.forward(out, ld);
      },
      layer);
  return out;
}

double pair_correlation(const Matrix& u, const Matrix& v, std::size_t j) {
  const std::size_t n = u.rows();
  double mu = 0.0, mv = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    mu += u(r, j);
    mv += v(r, j);
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double a = u(r, j) - mu;
    const double b = v(r, j) - mv;
    suv += a * b;
    suu += a * a;
    svv += b * b;
  }
  if (!(suu > 0.0 && svv > 0.0)) return 0.0;
  return suv / std::sqrt(suu * svv);
}

void adam_update(CompositeFlow& flow, const Vector& grads, nn::AdamState& state, double lr) {
  Vector params = flow.parameters();
  nn::adam_step(params, grads, state, lr);
  flow.set_parameters(params);
}

}  // namespace

void TrainConfig::validate() const {
  require(epochs > 0, ErrorCode::kInvalidArgument, "TrainConfig: epochs must be positive");
  require(batch_size > 0, ErrorCode::kInvalidArgument, "TrainConfig: batch size must be positive");
  require(lr_final > 0.0 && lr_final <= lr_init && std::isfinite(lr_init), ErrorCode::kInvalidArgument,
          "TrainConfig: need 0 < lr_final <= lr_init");
  require(ema_gamma > 0.0 && ema_gamma <= 1.0, ErrorCode::kInvalidArgument,
          "TrainConfig: EMA coefficient must lie in (0, 1]");
  require(trace_stride > 0, ErrorCode::kInvalidArgument, "TrainConfig: trace stride must be positive");
  require(average_last > 0, ErrorCode::kInvalidArgument, "TrainConfig: averaging window must be positive");
  require(ci_level > 0.0 && ci_level < 1.0, ErrorCode::kInvalidArgument,
          "TrainConfig: confidence level must lie in (0, 1)");
  require(holdout_fraction >= 0.0 && holdout_fraction < 1.0, ErrorCode::kInvalidArgument,
          "TrainConfig: holdout fraction must lie in [0, 1)");
  require(flow.coupling_layers > 0 && flow.hidden_width > 0 && flow.scale_clamp > 0.0,
          ErrorCode::kInvalidArgument, "TrainConfig: invalid flow architecture");
}

double TrainConfig::learning_rate(std::size_t epoch, std::size_t step, std::size_t steps_per_epoch) const {
  if (!cosine_decay) return lr_init;
  const double total = static_cast<double>(epochs * steps_per_epoch);
  const double t = static_cast<double>(epoch * steps_per_epoch + step);
  return lr_final + 0.5 * (lr_init - lr_final) * (1.0 + std::cos(numerics::kPi * t / total));
}

MienfTrainer::MienfTrainer(const Matrix& x, const Matrix& y, const TrainConfig& cfg, Kind kind)
    : kind_(kind), cfg_(cfg), shuffle_rng_(make_rng(cfg.seed, streams::kShuffle)) {
  cfg_.validate();
  require(x.rows() == y.rows(), ErrorCode::kShapeMismatch, "fit_mienf: x and y have different sample counts");
  require(x.cols() > 0 && y.cols() > 0, ErrorCode::kInvalidArgument, "fit_mienf: empty component");
  require(x.all_finite() && y.all_finite(), ErrorCode::kNonFinite, "fit_mienf: non-finite input");
  const std::size_t dx = x.cols();
  const std::size_t dy = y.cols();
  const std::size_t n = x.rows();
  require(n >= 10 * (dx + dy), ErrorCode::kInsufficientSamples,
          "fit_mienf: need at least 10 (d_x + d_y) samples");

  const auto held = static_cast<std::size_t>(std::floor(cfg_.holdout_fraction * static_cast<double>(n)));
  const std::size_t n_train = n - held;
  require(n_train >= 10 * (dx + dy), ErrorCode::kInsufficientSamples,
          "fit_mienf: holdout leaves too few training samples");
  std::vector<std::size_t> train_idx(n_train), hold_idx(held);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  std::iota(hold_idx.begin(), hold_idx.end(), n_train);
  x_train_ = x.select_rows(train_idx);
  y_train_ = y.select_rows(train_idx);
  if (held > 0) {
    x_hold_ = x.select_rows(hold_idx);
    y_hold_ = y.select_rows(hold_idx);
  }

  Layer pre_x, pre_y;
  const std::size_t paired = std::min(dx, dy);
  if (cfg_.preprocess == Preprocess::kCca) {
    const CcaResult cca = cca_tridiagonalize(x_train_, y_train_);
    pre_x = flows::FixedAffine(cca.mean_x, cca.map_x, cca.inverse_map_x);
    pre_y = flows::FixedAffine(cca.mean_y, cca.map_y, cca.inverse_map_y);
  } else {
    auto sx = flows::Standardize::fit(x_train_);
    auto sy = flows::Standardize::fit(y_train_);
    const Matrix u = apply_fixed(sx, x_train_);
    const Matrix v = apply_fixed(sy, y_train_);
    // The base only models nonnegative pair correlations.
    for (std::size_t j = 0; j < paired; ++j)
      if (pair_correlation(u, v, j) < 0.0) sy.flip(j);
    pre_x = std::move(sx);
    pre_y = std::move(sy);
  }

  Rng init_rng = make_rng(cfg_.seed, streams::kInit);
  flows_.fx = with_preprocessing(pre_x, x_train_, cfg_.flow, init_rng);
  flows_.fy = with_preprocessing(pre_y, y_train_, cfg_.flow, init_rng);

  if (kind_ == Kind::kTridiag) {
    tridiag_ = base::TridiagGaussianBase(dx, dy);
    if (cfg_.data_init) {
      const Matrix u = apply_fixed(pre_x, x_train_);
      const Matrix v = apply_fixed(pre_y, y_train_);
      Vector& w = tridiag_.mutable_w();
      for (std::size_t j = 0; j < paired; ++j) {
        const double r = std::clamp(pair_correlation(u, v, j), 0.0, 1.0 - 1e-12);
        w[j] = std::log(std::max(-0.5 * std::log1p(-r * r), kMinInitMi));
      }
      tridiag_.clamp_w();
    }
    adam_w_ = nn::AdamState(tridiag_.paired());
  } else {
    const Matrix z = joint_latent(x_train_, y_train_, nullptr);
    full_ = base::FullGaussianBase(numerics::column_means(z), numerics::covariance(z), cfg_.ema_gamma);
  }
  adam_x_ = nn::AdamState(flows_.fx.parameter_count());
  adam_y_ = nn::AdamState(flows_.fy.parameter_count());
}

Matrix MienfTrainer::joint_latent(const Matrix& x, const Matrix& y, Vector* logdet) const {
  auto [zx, lx] = flows_.fx.transform(x);
  auto [zy, ly] = flows_.fy.transform(y);
  if (logdet) {
    logdet->resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) (*logdet)[i] = lx[i] + ly[i];
  }
  return numerics::hconcat(zx, zy);
}

TracePoint MienfTrainer::run_epoch() {
  const std::size_t n = x_train_.rows();
  const std::size_t dx = x_train_.cols();
  const std::size_t dy = y_train_.cols();
  const std::size_t steps = (n + cfg_.batch_size - 1) / cfg_.batch_size;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i-- > 1;) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(perm[i], perm[pick(shuffle_rng_)]);
  }

  double loglik_sum = 0.0;
  std::size_t begin = 0;
  for (std::size_t step = 0; step < steps; ++step) {
    // Near-equal batch sizes so no batch is degenerate.
    const std::size_t end = n * (step + 1) / steps;
    const std::span<const std::size_t> idx(perm.data() + begin, end - begin);
    begin = end;
    const std::size_t nb = idx.size();
    const Matrix xb = x_train_.select_rows(idx);
    const Matrix yb = y_train_.select_rows(idx);

    auto fwd = flows_.forward(xb, yb);
    const Matrix z = numerics::hconcat(fwd.x.latent, fwd.y.latent);
    const Vector upstream(nb, -1.0 / static_cast<double>(nb));
    const double lr = cfg_.learning_rate(epoch_, step, steps);

    Matrix gz;
    double batch_ll = 0.0;
    if (kind_ == Kind::kTridiag) {
      const auto ll = tridiag_.loglik(z);
      batch_ll = ll.total;
      auto g = tridiag_.loglik_grad(z, upstream);
      gz = std::move(g.latent);
      nn::adam_step(tridiag_.mutable_w(), g.w, adam_w_, lr);
      tridiag_.clamp_w();
    } else {
      full_.update(z, base::MomentUpdate::kEma);
      const auto ll = full_.loglik(z);
      batch_ll = ll.total;
      gz = full_.loglik_grad(z, upstream);
    }
    for (double v : fwd.logdet) batch_ll += v;
    require(std::isfinite(batch_ll), ErrorCode::kNonFinite, "fit_mienf: training diverged");
    loglik_sum += batch_ll;

    const auto gx = flows_.fx.backward(fwd.x.tape, gz.col_block(0, dx), upstream);
    const auto gy = flows_.fy.backward(fwd.y.tape, gz.col_block(dx, dy), upstream);
    adam_update(flows_.fx, gx.parameters, adam_x_, lr);
    adam_update(flows_.fy, gy.parameters, adam_y_, lr);
  }
  ++epoch_;
  TracePoint tp;
  tp.epoch = epoch_;
  tp.loglik = loglik_sum / static_cast<double>(n);
  tp.estimate = running_estimate();
  require(std::isfinite(tp.estimate), ErrorCode::kNonFinite, "fit_mienf: training diverged");
  return tp;
}

double MienfTrainer::running_estimate() const {
  if (kind_ == Kind::kTridiag) return tridiag_.mutual_information();
  return std::max(0.0, gaussian_mi_from_covariance(full_.covariance(), x_train_.cols()));
}

double MienfTrainer::latent_moment_estimate() const {
  const Matrix z = joint_latent(x_train_, y_train_, nullptr);
  return std::max(0.0, gaussian_mi_from_covariance(numerics::covariance(z), x_train_.cols()));
}

double MienfTrainer::mean_loglik(const Matrix& x, const Matrix& y) const {
  Vector ld;
  const Matrix z = joint_latent(x, y, &ld);
  const Vector ll = kind_ == Kind::kTridiag ? tridiag_.loglik(z).per_sample : full_.loglik(z).per_sample;
  double total = 0.0;
  for (std::size_t i = 0; i < ll.size(); ++i) total += ll[i] + ld[i];
  return total / static_cast<double>(ll.size());
}

EstimationReport MienfTrainer::fit() {
  const auto start = std::chrono::steady_clock::now();
  EstimationReport rep;
  rep.estimator = kind_ == Kind::kTridiag ? "tridiag_mienf" : "full_mienf";
  rep.ci_level = cfg_.ci_level;

  const std::size_t window = std::min(cfg_.average_last, cfg_.epochs);
  Vector tail;
  tail.reserve(window);
  for (std::size_t e = epochs_done(); e < cfg_.epochs; ++e) {
    const TracePoint tp = run_epoch();
    if (tp.epoch % cfg_.trace_stride == 0 || tp.epoch == cfg_.epochs) rep.trace.push_back(tp);
    if (cfg_.epochs - tp.epoch < window) tail.push_back(tp.estimate);
  }

  const double k = static_cast<double>(tail.size());
  const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / k;
  double var = 0.0;
  for (double v : tail) var += (v - mean) * (v - mean);
  var = tail.size() > 1 ? var / (k - 1.0) : 0.0;
  const double z = numerics::std_normal_quantile(0.5 + 0.5 * cfg_.ci_level);
  const double half = z * std::sqrt(var / k);
  rep.point = std::max(0.0, mean);
  rep.ci_low = std::max(0.0, mean - half);
  rep.ci_high = std::max(0.0, mean + half);
  rep.averaged_epochs = tail.size();
  rep.final_estimate = std::max(0.0, running_estimate());

  Vector ld;
  const Matrix latent = joint_latent(x_train_, y_train_, &ld);
  Vector ll;
  if (kind_ == Kind::kTridiag) {
    ll = tridiag_.loglik(latent).per_sample;
    rep.kld_lower_bound = kld_lower_bound(latent, tridiag_);
    for (double w : tridiag_.w()) rep.component_mi.push_back(std::exp(w));
  } else {
    ll = full_.loglik(latent).per_sample;
    rep.kld_lower_bound = kld_lower_bound(latent, full_);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ll.size(); ++i) total += ll[i] + ld[i];
  rep.final_loglik = total / static_cast<double>(ll.size());
  rep.holdout_loglik = x_hold_.rows() > 0 ? mean_loglik(x_hold_, y_hold_) : std::nan("");
  rep.samples = x_train_.rows() + x_hold_.rows();
  rep.epochs = cfg_.epochs;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

EstimationReport fit_tridiag_mienf(const Matrix& x, const Matrix& y, const TrainConfig& cfg) {
  return MienfTrainer(x, y, cfg, MienfTrainer::Kind::kTridiag).fit();
}

EstimationReport fit_full_mienf(const Matrix& x, const Matrix& y, const TrainConfig& cfg) {
  return MienfTrainer(x, y, cfg, MienfTrainer::Kind::kFull).fit();
}

double kld_lower_bound(const Matrix& latent, std::span<const double> log_q) {
  require(latent.rows() > 0, ErrorCode::kInsufficientSamples, "kld_lower_bound: empty batch");
  require(log_q.size() == latent.rows(), ErrorCode::kShapeMismatch,
          "kld_lower_bound: one log-density per row is required");
  const double d = static_cast<double>(latent.cols());
  const double logdet = numerics::cholesky_logdet(numerics::covariance(latent)).logdet;
  const double entropy = 0.5 * (d * (numerics::kLog2Pi + 1.0) + logdet);
  const double cross = -std::accumulate(log_q.begin(), log_q.end(), 0.0) / static_cast<double>(log_q.size());
  return std::max(0.0, cross - entropy);
}

double kld_lower_bound(const Matrix& latent, const base::TridiagGaussianBase& base) {
  return kld_lower_bound(latent, base.loglik(latent).per_sample);
}

double kld_lower_bound(const Matrix& latent, const base::FullGaussianBase& base) {
  return kld_lower_bound(latent, base.loglik(latent).per_sample);
}

}  // namespace mienf::estimators
