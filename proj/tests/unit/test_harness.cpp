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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "doctest.h"
#include "harness/harness.hpp"

using namespace mienf::harness;

namespace {

SweepRow make_row(double mi, std::size_t rep, double est) {
  SweepRow r;
  r.true_mi = mi;
  r.repeat = rep;
  r.estimate = est;
  r.ci_low = est - 0.125;
  r.ci_high = est + 1.0 / 3.0;
  r.seconds = 0.1 * static_cast<double>(rep + 1);
  return r;
}

// Drops the last CSV field on every line.
std::string without_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

mienf::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const mienf::Error& e) {
    return e.code();
  }
  return mienf::ErrorCode::kOk;
}

}  // namespace

TEST_CASE("settings parser handles sections, comments and quotes") {
  const Settings s = parse_settings(
      "# leading comment\n"
      "family = gaussian   # trailing\n"
      "output = \"runs/a#b.csv\"\n"
      "\n"
      "[grid]\n"
      "start = 0\n"
      "stop=10\n"
      "[ train ]\n"
      "  epochs = 12\n");
  CHECK(s.at("family") == "gaussian");
  CHECK(s.at("output") == "runs/a#b.csv");
  CHECK(s.at("grid.start") == "0");
  CHECK(s.at("grid.stop") == "10");
  CHECK(s.at("train.epochs") == "12");
  CHECK(s.size() == 5);

  CHECK(code_of([] { parse_settings("a = 1\na = 2\n"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([] { parse_settings("no equals sign\n"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([] { parse_settings("[broken\n"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([] { parse_settings(" = 3\n"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([] { parse_settings("k = \"open\n"); }) == mienf::ErrorCode::kParseError);
}

TEST_CASE("spec parsing, validation and grid") {
  const ExperimentSpec spec = parse_spec(
      "family = student\ndim_x = 2\ndim_y = 3\ndof = 5\nestimator = ksg\nrepeats = 4\nseed = 17\n"
      "[grid]\nstart = 1\nstop = 4\nsteps = 4\n[train]\nepochs = 7\npreprocess = cca\n[ksg]\nk = 5\n");
  CHECK(spec.family == "student");
  CHECK(spec.dim_x == 2);
  CHECK(spec.dim_y == 3);
  CHECK(spec.dof == 5);
  CHECK(spec.repeats == 4);
  CHECK(spec.seed == 17);
  CHECK(spec.ksg_k == 5);
  CHECK(spec.train.epochs == 7);
  CHECK(spec.train.preprocess == mienf::estimators::Preprocess::kCca);
  CHECK(spec.grid() == Vector{1.0, 2.0, 3.0, 4.0});

  ExperimentSpec one;
  one.mi_start = 3.5;
  one.mi_stop = 9.0;
  CHECK(one.grid() == Vector{3.5});

  ExperimentSpec ten;
  ten.mi_stop = 10.0;
  ten.mi_steps = 11;
  const Vector g = ten.grid();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-15));

  ExperimentSpec s;
  CHECK(code_of([&] { apply_setting(s, "no_such_key", "1"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([&] { apply_setting(s, "samples", "-4"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([&] { apply_setting(s, "confidence", "high"); }) == mienf::ErrorCode::kParseError);
  CHECK(code_of([&] { apply_setting(s, "train.cosine_decay", "maybe"); }) == mienf::ErrorCode::kParseError);

  auto invalid = [](auto mutate) {
    ExperimentSpec e;
    mutate(e);
    return code_of([&] { e.validate(); });
  };
  CHECK(invalid([](ExperimentSpec& e) { e.mi_steps = 0; }) == mienf::ErrorCode::kInvalidArgument);
  CHECK(invalid([](ExperimentSpec& e) { e.repeats = 0; }) == mienf::ErrorCode::kInvalidArgument);
  CHECK(invalid([](ExperimentSpec& e) { e.mi_start = -1.0; }) == mienf::ErrorCode::kInvalidArgument);
  CHECK(invalid([](ExperimentSpec& e) { e.estimator = "magic"; }) == mienf::ErrorCode::kInvalidArgument);
  CHECK(invalid([](ExperimentSpec& e) { e.family = "cauchy"; }) == mienf::ErrorCode::kUnsupportedFamily);
  CHECK(invalid([](ExperimentSpec& e) { e.dim_y = 2; }) == mienf::ErrorCode::kInvalidArgument);
  CHECK(invalid([](ExperimentSpec&) {}) == mienf::ErrorCode::kOk);
}

TEST_CASE("aggregate statistics") {
  SUBCASE("identical repeats give a zero-width interval") {
    const Summary s = aggregate({make_row(2.0, 0, 1.5), make_row(2.0, 1, 1.5), make_row(2.0, 2, 1.5)}, 0.95);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].std == 0.0);
    CHECK(s.points[0].ci_half_width == 0.0);
    CHECK(s.points[0].rmse == doctest::Approx(0.5));
  }
  SUBCASE("two repeats {4, 6}") {
    const Summary s = aggregate({make_row(5.0, 0, 4.0), make_row(5.0, 1, 6.0)}, 0.999);
    const auto& p = s.points[0];
    CHECK(p.count == 2);
    CHECK(p.mean == doctest::Approx(5.0));
    CHECK(p.std == doctest::Approx(std::sqrt(2.0)));
    // half width = z std / sqrt(2) = z
    CHECK(p.ci_half_width == doctest::Approx(3.2905).epsilon(1e-4));
    CHECK(p.rmse == doctest::Approx(1.0));
  }
  SUBCASE("grouping and overall RMSE") {
    SweepRow bad = make_row(1.0, 1, 0.0);
    bad.error = "Internal: boom";
    bad.estimate = std::nan("");
    const Summary s =
        aggregate({make_row(1.0, 0, 1.5), bad, make_row(0.0, 0, 0.2), make_row(1.0, 2, 0.5)}, 0.9);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].true_mi == 1.0);
    CHECK(s.points[0].count == 2);
    CHECK(s.points[1].count == 1);
    CHECK(s.rmse == doctest::Approx(std::sqrt((0.25 + 0.25 + 0.04) / 3.0)));
  }
  CHECK_THROWS_AS(aggregate({}, 1.0), mienf::Error);
}

TEST_CASE("emitters") {
  SweepResult empty;
  CHECK(to_csv(empty) == "true_mi,repeat,estimate,ci_low,ci_high,seconds\n");

  SweepResult one;
  one.rows.push_back(make_row(0.1, 0, 0.7));
  const std::string csv = to_csv(one);
  std::istringstream in(csv);
  std::string header, line, extra;
  std::getline(in, header);
  std::getline(in, line);
  CHECK_FALSE(static_cast<bool>(std::getline(in, extra)));
  CHECK(count_fields(line) == 6);

  SweepResult many;
  for (std::size_t i = 0; i < 6; ++i) many.rows.push_back(make_row(0.1 * static_cast<double>(i / 2), i % 2,
                                                                   std::exp(0.3 * static_cast<double>(i)) / 7.0));
  many.summary = aggregate(many.rows, 0.95);

  const SweepResult from_csv = sweep_from_csv(to_csv(many), 0.95);
  const SweepResult from_json = sweep_from_json(to_json(many));
  for (const SweepResult* back : {&from_csv, &from_json}) {
    REQUIRE(back->rows.size() == many.rows.size());
    for (std::size_t i = 0; i < many.rows.size(); ++i) {
      CHECK(back->rows[i].true_mi == many.rows[i].true_mi);
      CHECK(back->rows[i].repeat == many.rows[i].repeat);
      CHECK(back->rows[i].estimate == many.rows[i].estimate);
      CHECK(back->rows[i].ci_low == many.rows[i].ci_low);
      CHECK(back->rows[i].ci_high == many.rows[i].ci_high);
      CHECK(back->rows[i].seconds == many.rows[i].seconds);
    }
    CHECK(back->summary.rmse == many.summary.rmse);
  }
  CHECK(to_csv(from_csv) == to_csv(many));
  CHECK(to_json(from_json) == to_json(many));

  const auto dir = std::filesystem::temp_directory_path() / "mienf_test_harness";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.json").string();
  emit(many, Format::kJson, path);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == to_json(many));
  CHECK(code_of([&] { emit(many, Format::kCsv, (dir / "missing" / "x.csv").string()); }) ==
        mienf::ErrorCode::kIoError);
  CHECK(parse_format("csv") == Format::kCsv);
  CHECK_THROWS_AS(parse_format("xml"), mienf::Error);
}

TEST_CASE("independent data gives near-zero estimates") {
  for (const char* est : {"closed_form", "ksg"}) {
    CAPTURE(est);
    ExperimentSpec spec;
    spec.estimator = est;
    spec.dim_x = spec.dim_y = 2;
    spec.samples = 10000;
    spec.repeats = 2;
    spec.seed = 3;
    const SweepResult r = run_experiment(spec);
    CHECK(r.error_count() == 0);
    CHECK(r.summary.points[0].mean <= 0.1);
  }
}

TEST_CASE("closed-form sweep over 0..10 on 2-d Gaussians") {
  ExperimentSpec spec;
  spec.mi_stop = 10.0;
  spec.mi_steps = 11;
  spec.samples = 10000;
  spec.repeats = 3;
  spec.seed = 11;
  const SweepResult r = run_experiment(spec);
  CHECK(r.rows.size() == 33);
  CHECK(r.error_count() == 0);
  CHECK(r.summary.rmse <= 0.15);
}

TEST_CASE("sweeps are deterministic and independent of the job count") {
  ExperimentSpec spec;
  spec.family = "smoothed_uniform";
  spec.dim_x = spec.dim_y = 2;
  spec.estimator = "ksg";
  spec.mapping = "gaussian_cdf";
  spec.mi_start = 0.5;
  spec.mi_stop = 2.0;
  spec.mi_steps = 3;
  spec.repeats = 2;
  spec.samples = 1500;
  spec.seed = 99;
  const std::string a = without_seconds(to_csv(run_experiment(spec, 1)));
  const std::string b = without_seconds(to_csv(run_experiment(spec, 1)));
  const std::string c = without_seconds(to_csv(run_experiment(spec, 3)));
  CHECK(a == b);
  CHECK(a == c);

  spec.seed = 100;
  CHECK(without_seconds(to_csv(run_experiment(spec, 1))) != a);
}

TEST_CASE("failing cells become error rows") {
  ExperimentSpec spec;
  spec.family = "student";
  spec.dim_x = spec.dim_y = 8;
  spec.dof = 4;
  spec.mi_start = 0.0;
  spec.mi_stop = 2.0;
  spec.mi_steps = 2;
  spec.repeats = 2;
  spec.samples = 2000;
  const SweepResult r = run_experiment(spec, 2);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.error_count() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.rows[i].error.rfind("TargetBelowCorrection", 0) == 0);
    CHECK(std::isnan(r.rows[i].estimate));
    CHECK(r.rows[i].repeat == i);
  }
  for (std::size_t i = 2; i < 4; ++i) {
    CHECK(r.rows[i].error.empty());
    CHECK(std::isfinite(r.rows[i].estimate));
  }
  CHECK(r.summary.points[0].count == 0);
  CHECK(r.summary.points[1].count == 2);
}

TEST_CASE("estimator dispatch") {
  CHECK(estimator_names().size() == 4);
  mienf::numerics::Matrix x(10, 1, 0.5), y(10, 1, 0.5);
  CHECK(code_of([&] { run_estimator("nope", x, y, {}); }) == mienf::ErrorCode::kInvalidArgument);
}
