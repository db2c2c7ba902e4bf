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

#include "harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "estimators/gaussian.hpp"
#include "estimators/ksg.hpp"
#include "json.hpp"
#include "numerics/special.hpp"

namespace mienf::harness {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  raise(ErrorCode::kParseError, "spec: invalid value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(v)) bad_value(key, value);
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-') bad_value(key, value);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (*end != '\0') bad_value(key, value);
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& raw, std::size_t line_no) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      out.push_back(raw[i]);
    }
    return out;
  }
  if (!raw.empty() && (raw.front() == '"' || raw.back() == '"'))
    raise(ErrorCode::kParseError, "spec: unbalanced quotes on line " + std::to_string(line_no));
  return raw;
}

double json_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json json_number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Settings parse_settings(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      require(body.back() == ']' && body.size() > 2, ErrorCode::kParseError,
              "spec: malformed section header on line " + std::to_string(line_no));
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::kParseError,
            "spec: expected key = value on line " + std::to_string(line_no));
    const std::string key = trim(body.substr(0, eq));
    require(!key.empty(), ErrorCode::kParseError, "spec: empty key on line " + std::to_string(line_no));
    const std::string full = section.empty() ? key : section + "." + key;
    const bool inserted = out.emplace(full, unquote(trim(body.substr(eq + 1)), line_no)).second;
    require(inserted, ErrorCode::kParseError, "spec: duplicate key '" + full + "'");
  }
  return out;
}

void apply_setting(ExperimentSpec& s, const std::string& key, const std::string& v) {
  auto& t = s.train;
  if (key == "family") s.family = v;
  else if (key == "dim") s.dim_x = s.dim_y = to_uint(key, v);
  else if (key == "dim_x") s.dim_x = to_uint(key, v);
  else if (key == "dim_y") s.dim_y = to_uint(key, v);
  else if (key == "dof") s.dof = static_cast<unsigned>(to_uint(key, v));
  else if (key == "mapping") s.mapping = v;
  else if (key == "estimator") s.estimator = v;
  else if (key == "samples") s.samples = to_uint(key, v);
  else if (key == "repeats") s.repeats = to_uint(key, v);
  else if (key == "seed") s.seed = to_uint(key, v);
  else if (key == "confidence") s.confidence = to_double(key, v);
  else if (key == "output") s.output = v;
  else if (key == "grid.start") s.mi_start = to_double(key, v);
  else if (key == "grid.stop") s.mi_stop = to_double(key, v);
  else if (key == "grid.steps") s.mi_steps = to_uint(key, v);
  else if (key == "ksg.k") s.ksg_k = to_uint(key, v);
  else if (key == "train.epochs") t.epochs = to_uint(key, v);
  else if (key == "train.batch_size") t.batch_size = to_uint(key, v);
  else if (key == "train.lr_init") t.lr_init = to_double(key, v);
  else if (key == "train.lr_final") t.lr_final = to_double(key, v);
  else if (key == "train.cosine_decay") t.cosine_decay = to_bool(key, v);
  else if (key == "train.ema_gamma") t.ema_gamma = to_double(key, v);
  else if (key == "train.coupling_layers") t.flow.coupling_layers = to_uint(key, v);
  else if (key == "train.hidden_width") t.flow.hidden_width = to_uint(key, v);
  else if (key == "train.hidden_layers") t.flow.hidden_layers = to_uint(key, v);
  else if (key == "train.scale_clamp") t.flow.scale_clamp = to_double(key, v);
  else if (key == "train.elementwise") t.flow.elementwise = to_bool(key, v);
  else if (key == "train.elementwise_layers") t.flow.elementwise_layers = to_uint(key, v);
  else if (key == "train.trace_stride") t.trace_stride = to_uint(key, v);
  else if (key == "train.average_last") t.average_last = to_uint(key, v);
  else if (key == "train.ci_level") t.ci_level = to_double(key, v);
  else if (key == "train.holdout_fraction") t.holdout_fraction = to_double(key, v);
  else if (key == "train.data_init") t.data_init = to_bool(key, v);
  else if (key == "train.preprocess") {
    if (v == "standardize") t.preprocess = estimators::Preprocess::kStandardize;
    else if (v == "cca") t.preprocess = estimators::Preprocess::kCca;
    else bad_value(key, v);
  } else {
    raise(ErrorCode::kParseError, "spec: unknown key '" + key + "'");
  }
}

ExperimentSpec spec_from_settings(const Settings& settings) {
  ExperimentSpec spec;
  for (const auto& [k, v] : settings) apply_setting(spec, k, v);
  spec.validate();
  return spec;
}

ExperimentSpec parse_spec(const std::string& text) { return spec_from_settings(parse_settings(text)); }

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIoError, "spec: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

void ExperimentSpec::validate() const {
  require(family == "gaussian" || family == "student" || family == "smoothed_uniform",
          ErrorCode::kUnsupportedFamily, "spec: unknown family '" + family + "'");
  require(dim_x > 0 && dim_y > 0, ErrorCode::kInvalidArgument, "spec: dimensions must be positive");
  require(family == "student" || dim_x == dim_y, ErrorCode::kInvalidArgument,
          "spec: family '" + family + "' needs dim_x == dim_y");
  synthetic::parse_mapping_chain(mapping);
  const auto names = estimator_names();
  require(std::find(names.begin(), names.end(), estimator) != names.end(), ErrorCode::kInvalidArgument,
          "spec: unknown estimator '" + estimator + "'");
  require(mi_steps >= 1, ErrorCode::kInvalidArgument, "spec: grid.steps must be at least 1");
  require(repeats >= 1, ErrorCode::kInvalidArgument, "spec: repeats must be at least 1");
  require(mi_start >= 0.0 && mi_stop >= 0.0, ErrorCode::kInvalidArgument, "spec: MI grid must be nonnegative");
  require(samples >= 2, ErrorCode::kInvalidArgument, "spec: samples must be at least 2");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::kInvalidArgument,
          "spec: confidence must lie in (0, 1)");
  require(ksg_k >= 1, ErrorCode::kInvalidArgument, "spec: ksg.k must be at least 1");
  train.validate();
}

Vector ExperimentSpec::grid() const {
  Vector g(mi_steps);
  for (std::size_t i = 0; i < mi_steps; ++i)
    g[i] = mi_steps == 1 ? mi_start
                         : mi_start + (mi_stop - mi_start) * static_cast<double>(i) /
                                          static_cast<double>(mi_steps - 1);
  return g;
}

std::vector<std::string> estimator_names() { return {"closed_form", "ksg", "tridiag_mienf", "full_mienf"}; }

estimators::EstimationReport run_estimator(const std::string& name, const Matrix& x, const Matrix& y,
                                           const EstimatorOptions& options) {
  if (name == "tridiag_mienf" || name == "full_mienf") {
    estimators::TrainConfig cfg = options.train;
    cfg.seed = options.seed;
    return name == "tridiag_mienf" ? estimators::fit_tridiag_mienf(x, y, cfg)
                                   : estimators::fit_full_mienf(x, y, cfg);
  }
  const auto start = std::chrono::steady_clock::now();
  estimators::EstimationReport rep;
  rep.estimator = name;
  if (name == "closed_form") {
    rep.point = estimators::estimate_gaussian_closed_form(x, y);
  } else if (name == "ksg") {
    estimators::KsgOptions ko;
    ko.k = options.ksg_k;
    ko.seed = options.seed;
    rep.point = std::max(0.0, estimators::estimate_ksg(x, y, ko));
  } else {
    raise(ErrorCode::kInvalidArgument, "unknown estimator '" + name + "'");
  }
  rep.ci_low = rep.ci_high = rep.final_estimate = rep.point;
  rep.final_loglik = rep.holdout_loglik = std::numeric_limits<double>::quiet_NaN();
  rep.samples = x.rows();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

synthetic::LabeledDatasetPair make_dataset(const ExperimentSpec& spec, double target_mi, std::uint64_t seed) {
  synthetic::LabeledDatasetPair pair;
  if (spec.family == "gaussian") {
    pair = synthetic::gen_correlated_gaussian(spec.dim_x, target_mi, spec.samples, seed);
  } else if (spec.family == "student") {
    pair = synthetic::gen_student(spec.dim_x, spec.dim_y, spec.dof, target_mi, spec.samples, seed);
  } else if (spec.family == "smoothed_uniform") {
    pair = synthetic::gen_smoothed_uniform(spec.dim_x, target_mi, spec.samples, seed);
  } else {
    raise(ErrorCode::kUnsupportedFamily, "unknown family '" + spec.family + "'");
  }
  return synthetic::apply_mapping(std::move(pair), synthetic::parse_mapping_chain(spec.mapping), seed);
}

std::size_t SweepResult::error_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += !r.error.empty();
  return n;
}

SweepResult run_experiment(const ExperimentSpec& spec, std::size_t jobs) {
  spec.validate();
  const Vector grid = spec.grid();
  const std::size_t cells = grid.size() * spec.repeats;
  SweepResult result;
  result.rows.resize(cells);

  auto run_cell = [&](std::size_t cell) {
    SweepRow& row = result.rows[cell];
    row.true_mi = grid[cell / spec.repeats];
    row.repeat = cell % spec.repeats;
    const std::uint64_t seed = spec.seed + row.repeat;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto data = make_dataset(spec, row.true_mi, seed);
      row.true_mi = data.true_mi;
      EstimatorOptions opts{spec.train, spec.ksg_k, seed};
      const auto rep = run_estimator(spec.estimator, data.x, data.y, opts);
      row.estimate = rep.point;
      row.ci_low = rep.ci_low;
      row.ci_high = rep.ci_high;
    } catch (const Error& e) {
      row.error = std::string(error_code_name(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      row.error = std::string("Internal: ") + e.what();
    }
    if (!row.error.empty()) row.estimate = row.ci_low = row.ci_high = std::numeric_limits<double>::quiet_NaN();
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(cells, 1));
  if (workers == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    for (auto& t : pool) t.join();
  }
  result.summary = aggregate(result.rows, spec.confidence);
  return result;
}

Summary aggregate(const std::vector<SweepRow>& rows, double confidence) {
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::kInvalidArgument,
          "aggregate: confidence must lie in (0, 1)");
  const double z = numerics::std_normal_quantile(0.5 + 0.5 * confidence);
  Summary out;
  out.confidence = confidence;
  std::vector<std::vector<double>> groups;
  for (const auto& r : rows) {
    std::size_t g = 0;
    while (g < out.points.size() && out.points[g].true_mi != r.true_mi) ++g;
    if (g == out.points.size()) {
      out.points.push_back({});
      out.points.back().true_mi = r.true_mi;
      groups.emplace_back();
    }
    if (r.error.empty() && std::isfinite(r.estimate)) groups[g].push_back(r.estimate);
  }
  double total_sq = 0.0;
  std::size_t total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& p = out.points[g];
    const auto& v = groups[g];
    p.count = v.size();
    if (v.empty()) {
      p.mean = p.std = p.ci_half_width = p.rmse = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0, sq_err = 0.0;
    for (double e : v) {
      sum += e;
      sq_err += (e - p.true_mi) * (e - p.true_mi);
    }
    p.mean = sum / static_cast<double>(v.size());
    double var = 0.0;
    for (double e : v) var += (e - p.mean) * (e - p.mean);
    p.std = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    p.ci_half_width = z * p.std / std::sqrt(static_cast<double>(v.size()));
    p.rmse = std::sqrt(sq_err / static_cast<double>(v.size()));
    total_sq += sq_err;
    total += v.size();
  }
  out.rmse = total ? std::sqrt(total_sq / static_cast<double>(total)) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  raise(ErrorCode::kInvalidArgument, "unknown format '" + name + "' (expected csv or json)");
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "true_mi,repeat,estimate,ci_low,ci_high,seconds\n";
  for (const auto& r : result.rows)
    out << r.true_mi << ',' << r.repeat << ',' << r.estimate << ',' << r.ci_low << ',' << r.ci_high << ','
        << r.seconds << '\n';
  return out.str();
}

std::string to_json(const SweepResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"true_mi", r.true_mi},
                    {"repeat", r.repeat},
                    {"estimate", json_number_or_null(r.estimate)},
                    {"ci_low", json_number_or_null(r.ci_low)},
                    {"ci_high", json_number_or_null(r.ci_high)},
                    {"seconds", r.seconds},
                    {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
  json points = json::array();
  for (const auto& p : result.summary.points)
    points.push_back({{"true_mi", p.true_mi},
                      {"count", p.count},
                      {"mean", json_number_or_null(p.mean)},
                      {"std", json_number_or_null(p.std)},
                      {"ci_half_width", json_number_or_null(p.ci_half_width)},
                      {"rmse", json_number_or_null(p.rmse)}});
  json j{{"rows", std::move(rows)},
         {"summary",
          {{"confidence", result.summary.confidence},
           {"points", std::move(points)},
           {"rmse", json_number_or_null(result.summary.rmse)}}}};
  return j.dump(2) + "\n";
}

SweepResult sweep_from_csv(const std::string& text, double confidence) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == "true_mi,repeat,estimate,ci_low,ci_high,seconds",
          ErrorCode::kParseError, "sweep csv: unexpected header");
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    require(cells.size() == 6, ErrorCode::kParseError, "sweep csv: expected 6 fields on line " + std::to_string(line_no));
    const auto num = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      require(!s.empty() && *end == '\0', ErrorCode::kParseError,
              "sweep csv: bad number '" + s + "' on line " + std::to_string(line_no));
      return v;
    };
    SweepRow r;
    r.true_mi = num(cells[0]);
    r.repeat = static_cast<std::size_t>(num(cells[1]));
    r.estimate = num(cells[2]);
    r.ci_low = num(cells[3]);
    r.ci_high = num(cells[4]);
    r.seconds = num(cells[5]);
    if (!std::isfinite(r.estimate)) r.error = "error";
    result.rows.push_back(std::move(r));
  }
  result.summary = aggregate(result.rows, confidence);
  return result;
}

SweepResult sweep_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SweepResult result;
    for (const auto& r : j.at("rows")) {
      SweepRow row;
      row.true_mi = r.at("true_mi").get<double>();
      row.repeat = r.at("repeat").get<std::size_t>();
      row.estimate = json_number(r.at("estimate"));
      row.ci_low = json_number(r.at("ci_low"));
      row.ci_high = json_number(r.at("ci_high"));
      row.seconds = r.at("seconds").get<double>();
      if (!r.at("error").is_null()) row.error = r.at("error").get<std::string>();
      result.rows.push_back(std::move(row));
    }
    result.summary = aggregate(result.rows, j.at("summary").at("confidence").get<double>());
    return result;
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("sweep json: ") + e.what());
  }
}

void emit(const SweepResult& result, Format format, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIoError, "emit: cannot open " + path);
  out << (format == Format::kCsv ? to_csv(result) : to_json(result));
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIoError, "emit: write failed for " + path);
}

}  // namespace mienf::harness
