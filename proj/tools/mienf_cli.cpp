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

// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "mienf/mienf.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitCellErrors = 2;

struct CliError {
  std::string message;
};

void check(mienf_status status, const std::string& what) {
  if (status != MIENF_OK)
    throw CliError{what + ": " + mienf_status_name(status) + ": " + mienf_last_error()};
}

struct ParamsDeleter {
  void operator()(mienf_params* p) const { mienf_params_destroy(p); }
};
struct DatasetDeleter {
  void operator()(mienf_dataset* d) const { mienf_dataset_destroy(d); }
};
struct ReportDeleter {
  void operator()(mienf_report* r) const { mienf_report_destroy(r); }
};
struct SweepDeleter {
  void operator()(mienf_sweep* s) const { mienf_sweep_destroy(s); }
};
using Params = std::unique_ptr<mienf_params, ParamsDeleter>;
using Dataset = std::unique_ptr<mienf_dataset, DatasetDeleter>;
using Report = std::unique_ptr<mienf_report, ReportDeleter>;
using Sweep = std::unique_ptr<mienf_sweep, SweepDeleter>;

Params load_params(const std::string& spec_path, const std::vector<std::string>& overrides) {
  mienf_params* raw = nullptr;
  check(mienf_params_create(&raw), "params");
  Params params(raw);
  if (!spec_path.empty()) check(mienf_params_load_file(params.get(), spec_path.c_str()), "spec " + spec_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliError{"--set expects key=value, got '" + kv + "'"};
    check(mienf_params_set(params.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
  return params;
}

std::string owned(char* s) {
  std::string out(s);
  mienf_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f || !(f << text)) throw CliError{"cannot write " + path};
}

std::string report_trace_csv(const mienf_report* report) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loglik,estimate\n";
  for (std::size_t i = 0; i < mienf_report_trace_length(report); ++i) {
    std::size_t epoch = 0;
    double ll = 0.0, est = 0.0;
    check(mienf_report_trace_at(report, i, &epoch, &ll, &est), "trace");
    out << epoch << ',' << ll << ',' << est << '\n';
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training allocates and frees many mid-sized buffers per step; keep them
  // on the heap instead of round-tripping through mmap.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif

  CLI::App app{"Mutual information estimation with Gaussianizing normalizing flows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mienf_version()));

  std::string spec_path, out_path, format;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub, bool need_spec) {
    auto* opt = sub->add_option("--spec", spec_path, "experiment spec file (key = value)");
    if (need_spec) opt->required()->check(CLI::ExistingFile);
    else opt->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--set", overrides, "extra key=value settings")->take_all();
  };

  auto* gen = app.add_subcommand("generate", "generate a labeled synthetic dataset");
  add_common(gen, true);
  double gen_mi = -1.0;
  gen->add_option("--mi", gen_mi, "target MI in nats (default: grid.start)");

  auto* est = app.add_subcommand("estimate", "estimate MI on a dataset CSV");
  add_common(est, true);
  std::string data_path, trace_path;
  est->add_option("--data", data_path, "dataset CSV (x_*, y_* columns)")->required()->check(CLI::ExistingFile);
  est->add_option("--trace", trace_path, "write the per-epoch trace CSV here");
  est->add_option("--format", format, "json (report) or csv (trace)")->check(CLI::IsMember({"json", "csv"}));

  auto* sweep = app.add_subcommand("sweep", "run an MI-grid sweep");
  add_common(sweep, true);
  sweep->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* oracle = app.add_subcommand("oracle", "Monte-Carlo pointwise-MI ground truth");
  std::string family = "gaussian";
  std::size_t dim = 1, dim_x = 0, dim_y = 0, n_mc = 1000000;
  unsigned dof = 4;
  double oracle_mi = 1.0;
  oracle->add_option("--family", family, "gaussian, student or smoothed_uniform");
  oracle->add_option("--dim", dim, "dimension of x and y");
  oracle->add_option("--dim-x", dim_x, "dimension of x (overrides --dim)");
  oracle->add_option("--dim-y", dim_y, "dimension of y (overrides --dim)");
  oracle->add_option("--dof", dof, "Student degrees of freedom");
  oracle->add_option("--mi", oracle_mi, "target MI in nats");
  oracle->add_option("--samples", n_mc, "Monte-Carlo sample count");
  oracle->add_option("--seed", seed, "seed");
  oracle->add_option("--out", out_path, "output path (stdout when omitted)");
  oracle->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Params params = load_params(spec_path, overrides);
      if (seed) check(mienf_params_set(params.get(), "seed", std::to_string(*seed).c_str()), "--seed");
      if (out_path.empty() && mienf_params_output(params.get())) out_path = mienf_params_output(params.get());
      if (out_path.empty()) throw CliError{"generate needs --out (or an output key in the spec)"};
      double target = gen_mi;
      if (target < 0.0) {
        std::size_t count = 0;
        check(mienf_params_grid(params.get(), &target, 1, &count), "grid");
      }
      mienf_dataset* raw = nullptr;
      check(mienf_dataset_generate(params.get(), target, seed.value_or(0), &raw), "generate");
      Dataset data(raw);
      check(mienf_dataset_save(data.get(), out_path.c_str()), "save");
      std::cerr << "wrote " << mienf_dataset_rows(data.get()) << " rows, true MI "
                << mienf_dataset_true_mi(data.get()) << " nats, to " << out_path << '\n';
      return 0;
    }
    if (est->parsed()) {
      Params params = load_params(spec_path, overrides);
      mienf_dataset* raw = nullptr;
      check(mienf_dataset_load(data_path.c_str(), &raw), "load " + data_path);
      Dataset data(raw);
      mienf_report* rep_raw = nullptr;
      check(mienf_estimate(params.get(), data.get(), seed.value_or(0), &rep_raw), "estimate");
      Report report(rep_raw);
      if (!trace_path.empty()) check(mienf_report_write_trace_csv(report.get(), trace_path.c_str()), "trace");
      char* json = nullptr;
      check(mienf_report_to_json(report.get(), &json), "report");
      const std::string text = owned(json);
      write_text(out_path, format == "csv" ? report_trace_csv(report.get()) : text + "\n");
      return 0;
    }
    if (sweep->parsed()) {
      Params params = load_params(spec_path, overrides);
      if (seed) check(mienf_params_set(params.get(), "seed", std::to_string(*seed).c_str()), "--seed");
      if (out_path.empty() && mienf_params_output(params.get())) out_path = mienf_params_output(params.get());
      mienf_sweep* raw = nullptr;
      check(mienf_sweep_run(params.get(), jobs, &raw), "sweep");
      Sweep result(raw);
      const std::string fmt = format.empty() ? "csv" : format;
      if (out_path.empty() || out_path == "-") {
        char* text = nullptr;
        check(mienf_sweep_to_string(result.get(), fmt.c_str(), &text), "sweep output");
        std::cout << owned(text);
      } else {
        check(mienf_sweep_write(result.get(), out_path.c_str(), fmt.c_str()), "write " + out_path);
      }
      const std::size_t errors = mienf_sweep_error_count(result.get());
      for (std::size_t i = 0; i < mienf_sweep_row_count(result.get()); ++i) {
        const char* msg = mienf_sweep_row_error(result.get(), i);
        if (*msg) std::cerr << "cell " << i << ": " << msg << '\n';
      }
      std::cerr << "rows " << mienf_sweep_row_count(result.get()) << ", errors " << errors << ", RMSE "
                << mienf_sweep_rmse(result.get()) << '\n';
      return errors ? kExitCellErrors : 0;
    }
    if (oracle->parsed()) {
      double mi = 0.0, se = 0.0;
      check(mienf_oracle(family.c_str(), dim_x ? dim_x : dim, dim_y ? dim_y : dim, oracle_mi, dof, n_mc,
                         seed.value_or(0), &mi, &se),
            "oracle");
      std::ostringstream out;
      out.precision(17);
      if (format == "csv") {
        out << "family,target_mi,mi,standard_error,samples\n"
            << family << ',' << oracle_mi << ',' << mi << ',' << se << ',' << n_mc << '\n';
      } else {
        out << "{\"family\": \"" << family << "\", \"target_mi\": " << oracle_mi << ", \"mi\": " << mi
            << ", \"standard_error\": " << se << ", \"samples\": " << n_mc << "}\n";
      }
      write_text(out_path, out.str());
      return 0;
    }
  } catch (const CliError& e) {
    std::cerr << "mienf: " << e.message << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
