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

#include "mienf/mienf.h"

#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "common/error.hpp"
#include "estimators/mienf.hpp"
#include "harness/harness.hpp"
#include "synthetic/synthetic.hpp"

struct mienf_params {
  mienf::harness::ExperimentSpec spec;
};

struct mienf_dataset {
  mienf::synthetic::LabeledDatasetPair pair;
};

struct mienf_report {
  mienf::estimators::EstimationReport report;
};

struct mienf_sweep {
  mienf::harness::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

mienf_status fail(mienf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
mienf_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MIENF_OK;
  } catch (const mienf::Error& e) {
    return fail(static_cast<mienf_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MIENF_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MIENF_INTERNAL, e.what());
  }
}

#define MIENF_REQUIRE_NONNULL(ptr)                                             \
  do {                                                                         \
    if (!(ptr)) return fail(MIENF_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* mienf_version(void) { return "0.1.0"; }

const char* mienf_status_name(mienf_status status) {
  return mienf::error_code_name(static_cast<mienf::ErrorCode>(status));
}

const char* mienf_last_error(void) { return g_last_error.c_str(); }

void mienf_string_free(char* s) { delete[] s; }

mienf_status mienf_params_create(mienf_params** out) {
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = new mienf_params(); });
}

void mienf_params_destroy(mienf_params* params) { delete params; }

mienf_status mienf_params_set(mienf_params* params, const char* key, const char* value) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(key);
  MIENF_REQUIRE_NONNULL(value);
  return guarded([&] { mienf::harness::apply_setting(params->spec, key, value); });
}

mienf_status mienf_params_load_string(mienf_params* params, const char* text) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(text);
  return guarded([&] {
    auto spec = params->spec;
    for (const auto& [k, v] : mienf::harness::parse_settings(text)) mienf::harness::apply_setting(spec, k, v);
    params->spec = std::move(spec);
  });
}

mienf_status mienf_params_load_file(mienf_params* params, const char* path) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(path);
  std::ifstream in(path);
  if (!in) return fail(MIENF_IO_ERROR, std::string("cannot open ") + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return mienf_params_load_string(params, text.c_str());
}

mienf_status mienf_params_validate(const mienf_params* params) {
  MIENF_REQUIRE_NONNULL(params);
  return guarded([&] { params->spec.validate(); });
}

const char* mienf_params_output(const mienf_params* params) {
  if (!params || params->spec.output.empty()) return nullptr;
  return params->spec.output.c_str();
}

mienf_status mienf_params_grid(const mienf_params* params, double* out, size_t capacity, size_t* count) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(count);
  return guarded([&] {
    const auto grid = params->spec.grid();
    *count = static_cast<size_t>(grid.size());
    if (capacity > 0 && !out) throw mienf::Error(mienf::ErrorCode::kInvalidArgument, "null grid buffer");
    for (size_t i = 0; i < capacity && i < *count; ++i) out[i] = grid[static_cast<Eigen::Index>(i)];
  });
}

mienf_status mienf_dataset_generate(const mienf_params* params, double target_mi, uint64_t seed,
                                    mienf_dataset** out) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] {
    params->spec.validate();
    *out = new mienf_dataset{mienf::harness::make_dataset(params->spec, target_mi, seed)};
  });
}

mienf_status mienf_dataset_from_arrays(const double* x, size_t dim_x, const double* y, size_t dim_y, size_t rows,
                                       mienf_dataset** out) {
  MIENF_REQUIRE_NONNULL(x);
  MIENF_REQUIRE_NONNULL(y);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] {
    mienf::synthetic::LabeledDatasetPair pair;
    pair.x = mienf::numerics::Matrix(rows, dim_x, std::vector<double>(x, x + rows * dim_x));
    pair.y = mienf::numerics::Matrix(rows, dim_y, std::vector<double>(y, y + rows * dim_y));
    pair.family = "external";
    pair.true_mi = kNaN;
    *out = new mienf_dataset{std::move(pair)};
  });
}

mienf_status mienf_dataset_load(const char* csv_path, mienf_dataset** out) {
  MIENF_REQUIRE_NONNULL(csv_path);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = new mienf_dataset{mienf::synthetic::read_dataset(csv_path)}; });
}

mienf_status mienf_dataset_save(const mienf_dataset* dataset, const char* csv_path) {
  MIENF_REQUIRE_NONNULL(dataset);
  MIENF_REQUIRE_NONNULL(csv_path);
  return guarded([&] { mienf::synthetic::write_dataset(dataset->pair, csv_path); });
}

mienf_status mienf_dataset_apply_mapping(mienf_dataset* dataset, const char* mapping, uint64_t seed) {
  MIENF_REQUIRE_NONNULL(dataset);
  MIENF_REQUIRE_NONNULL(mapping);
  return guarded([&] {
    const auto chain = mienf::synthetic::parse_mapping_chain(mapping);
    dataset->pair = mienf::synthetic::apply_mapping(std::move(dataset->pair), chain, seed);
  });
}

void mienf_dataset_destroy(mienf_dataset* dataset) { delete dataset; }

size_t mienf_dataset_rows(const mienf_dataset* dataset) { return dataset ? dataset->pair.x.rows() : 0; }
size_t mienf_dataset_dim_x(const mienf_dataset* dataset) { return dataset ? dataset->pair.x.cols() : 0; }
size_t mienf_dataset_dim_y(const mienf_dataset* dataset) { return dataset ? dataset->pair.y.cols() : 0; }
double mienf_dataset_true_mi(const mienf_dataset* dataset) { return dataset ? dataset->pair.true_mi : kNaN; }

static mienf_status copy_matrix(const mienf::numerics::Matrix& m, double* out, size_t capacity) {
  MIENF_REQUIRE_NONNULL(out);
  if (capacity < m.size()) return fail(MIENF_SHAPE_MISMATCH, "output buffer is too small");
  std::memcpy(out, m.data(), m.size() * sizeof(double));
  g_last_error.clear();
  return MIENF_OK;
}

mienf_status mienf_dataset_copy_x(const mienf_dataset* dataset, double* out, size_t capacity) {
  MIENF_REQUIRE_NONNULL(dataset);
  return copy_matrix(dataset->pair.x, out, capacity);
}

mienf_status mienf_dataset_copy_y(const mienf_dataset* dataset, double* out, size_t capacity) {
  MIENF_REQUIRE_NONNULL(dataset);
  return copy_matrix(dataset->pair.y, out, capacity);
}

mienf_status mienf_estimate(const mienf_params* params, const mienf_dataset* dataset, uint64_t seed,
                            mienf_report** out) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(dataset);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] {
    params->spec.train.validate();
    const mienf::harness::EstimatorOptions opts{params->spec.train, params->spec.ksg_k, seed};
    *out = new mienf_report{
        mienf::harness::run_estimator(params->spec.estimator, dataset->pair.x, dataset->pair.y, opts)};
  });
}

void mienf_report_destroy(mienf_report* report) { delete report; }
double mienf_report_point(const mienf_report* r) { return r ? r->report.point : kNaN; }
double mienf_report_ci_low(const mienf_report* r) { return r ? r->report.ci_low : kNaN; }
double mienf_report_ci_high(const mienf_report* r) { return r ? r->report.ci_high : kNaN; }
double mienf_report_final_loglik(const mienf_report* r) { return r ? r->report.final_loglik : kNaN; }
double mienf_report_kld_lower_bound(const mienf_report* r) { return r ? r->report.kld_lower_bound : kNaN; }
size_t mienf_report_trace_length(const mienf_report* r) { return r ? r->report.trace.size() : 0; }

mienf_status mienf_report_trace_at(const mienf_report* r, size_t index, size_t* epoch, double* loglik,
                                   double* estimate) {
  MIENF_REQUIRE_NONNULL(r);
  if (index >= r->report.trace.size()) return fail(MIENF_INVALID_ARGUMENT, "trace index out of range");
  const auto& tp = r->report.trace[index];
  if (epoch) *epoch = tp.epoch;
  if (loglik) *loglik = tp.loglik;
  if (estimate) *estimate = tp.estimate;
  g_last_error.clear();
  return MIENF_OK;
}

mienf_status mienf_report_to_json(const mienf_report* r, char** out) {
  MIENF_REQUIRE_NONNULL(r);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = copy_string(r->report.to_json()); });
}

mienf_status mienf_report_write_trace_csv(const mienf_report* r, const char* path) {
  MIENF_REQUIRE_NONNULL(r);
  MIENF_REQUIRE_NONNULL(path);
  return guarded([&] {
    std::ofstream f(path);
    mienf::require(static_cast<bool>(f), mienf::ErrorCode::kIoError, std::string("cannot open ") + path);
    r->report.write_trace_csv(f);
    f.flush();
    mienf::require(static_cast<bool>(f), mienf::ErrorCode::kIoError, std::string("write failed for ") + path);
  });
}

mienf_status mienf_sweep_run(const mienf_params* params, size_t jobs, mienf_sweep** out) {
  MIENF_REQUIRE_NONNULL(params);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = new mienf_sweep{mienf::harness::run_experiment(params->spec, jobs)}; });
}

void mienf_sweep_destroy(mienf_sweep* sweep) { delete sweep; }
size_t mienf_sweep_row_count(const mienf_sweep* s) { return s ? s->result.rows.size() : 0; }
size_t mienf_sweep_error_count(const mienf_sweep* s) { return s ? s->result.error_count() : 0; }
double mienf_sweep_rmse(const mienf_sweep* s) { return s ? s->result.summary.rmse : kNaN; }

mienf_status mienf_sweep_row(const mienf_sweep* s, size_t index, double* true_mi, size_t* repeat, double* estimate,
                             double* ci_low, double* ci_high, double* seconds) {
  MIENF_REQUIRE_NONNULL(s);
  if (index >= s->result.rows.size()) return fail(MIENF_INVALID_ARGUMENT, "row index out of range");
  const auto& row = s->result.rows[index];
  if (true_mi) *true_mi = row.true_mi;
  if (repeat) *repeat = row.repeat;
  if (estimate) *estimate = row.estimate;
  if (ci_low) *ci_low = row.ci_low;
  if (ci_high) *ci_high = row.ci_high;
  if (seconds) *seconds = row.seconds;
  g_last_error.clear();
  return MIENF_OK;
}

const char* mienf_sweep_row_error(const mienf_sweep* s, size_t index) {
  if (!s || index >= s->result.rows.size()) return "";
  return s->result.rows[index].error.c_str();
}

mienf_status mienf_sweep_write(const mienf_sweep* s, const char* path, const char* format) {
  MIENF_REQUIRE_NONNULL(s);
  MIENF_REQUIRE_NONNULL(path);
  MIENF_REQUIRE_NONNULL(format);
  return guarded([&] { mienf::harness::emit(s->result, mienf::harness::parse_format(format), path); });
}

mienf_status mienf_sweep_to_string(const mienf_sweep* s, const char* format, char** out) {
  MIENF_REQUIRE_NONNULL(s);
  MIENF_REQUIRE_NONNULL(format);
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] {
    const auto f = mienf::harness::parse_format(format);
    *out = copy_string(f == mienf::harness::Format::kCsv ? mienf::harness::to_csv(s->result)
                                                          : mienf::harness::to_json(s->result));
  });
}

mienf_status mienf_oracle(const char* family, size_t dim_x, size_t dim_y, double target_mi, unsigned dof,
                          size_t n_mc, uint64_t seed, double* mi, double* standard_error) {
  MIENF_REQUIRE_NONNULL(family);
  MIENF_REQUIRE_NONNULL(mi);
  return guarded([&] {
    const auto r = mienf::synthetic::mc_pmi_oracle({family, dim_x, dim_y, target_mi, dof}, n_mc, seed);
    *mi = r.mi;
    if (standard_error) *standard_error = r.standard_error;
  });
}

mienf_status mienf_student_correction(double dof, size_t dim_x, size_t dim_y, double* out) {
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = mienf::synthetic::student_correction(dof, dim_x, dim_y); });
}

mienf_status mienf_smoothed_uniform_mi(double eps, double* out) {
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = mienf::synthetic::smoothed_uniform_mi(eps); });
}

mienf_status mienf_smoothed_uniform_eps(double mi, double* out) {
  MIENF_REQUIRE_NONNULL(out);
  return guarded([&] { *out = mienf::synthetic::smoothed_uniform_eps(mi); });
}

}  // extern "C"
