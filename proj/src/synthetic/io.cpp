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

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "synthetic/synthetic.hpp"

namespace mienf::synthetic {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  require(end != cell.c_str() && *end == '\0', ErrorCode::kParseError,
          "dataset csv: bad number '" + cell + "' on line " + std::to_string(line));
  return v;
}

}  // namespace

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

void write_dataset(const LabeledDatasetPair& pair, const std::string& csv_path) {
  require(pair.x.rows() == pair.y.rows(), ErrorCode::kShapeMismatch, "write_dataset: row counts differ");
  std::ofstream out(csv_path);
  require(static_cast<bool>(out), ErrorCode::kIoError, "write_dataset: cannot open " + csv_path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t j = 0; j < pair.x.cols(); ++j) out << (j ? "," : "") << "x_" << j;
  for (std::size_t j = 0; j < pair.y.cols(); ++j) out << ",y_" << j;
  out << '\n';
  for (std::size_t r = 0; r < pair.x.rows(); ++r) {
    for (std::size_t j = 0; j < pair.x.cols(); ++j) out << (j ? "," : "") << pair.x(r, j);
    for (std::size_t j = 0; j < pair.y.cols(); ++j) out << ',' << pair.y(r, j);
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::kIoError, "write_dataset: write failed for " + csv_path);

  json meta{{"family", pair.family},
            {"mapping", pair.mapping},
            {"params", pair.params},
            {"true_mi", pair.true_mi},
            {"seed", pair.seed},
            {"dim_x", pair.x.cols()},
            {"dim_y", pair.y.cols()},
            {"samples", pair.x.rows()}};
  std::ofstream side(sidecar_path(csv_path));
  require(static_cast<bool>(side), ErrorCode::kIoError, "write_dataset: cannot open sidecar");
  side << meta.dump(2) << '\n';
}

LabeledDatasetPair read_dataset_csv(const std::string& csv_path, std::size_t dim_x) {
  std::ifstream in(csv_path);
  require(static_cast<bool>(in), ErrorCode::kIoError, "read_dataset: cannot open " + csv_path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kParseError, "read_dataset: missing header");
  const auto header = split_csv(line);
  const std::size_t width = header.size();
  if (dim_x == 0)
    while (dim_x < width && header[dim_x].rfind("x_", 0) == 0) ++dim_x;
  require(dim_x > 0 && dim_x < width, ErrorCode::kParseError,
          "read_dataset: header must name x_ columns followed by y_ columns");

  std::vector<double> xs, ys;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    require(cells.size() == width, ErrorCode::kParseError,
            "read_dataset: wrong field count on line " + std::to_string(line_no));
    for (std::size_t j = 0; j < width; ++j) (j < dim_x ? xs : ys).push_back(parse_double(cells[j], line_no));
    ++rows;
  }
  LabeledDatasetPair out;
  out.x = Matrix(rows, dim_x, std::move(xs));
  out.y = Matrix(rows, width - dim_x, std::move(ys));
  out.family = "file";
  return out;
}

LabeledDatasetPair read_dataset(const std::string& csv_path) {
  LabeledDatasetPair out = read_dataset_csv(csv_path);
  std::ifstream side(sidecar_path(csv_path));
  if (!side) return out;
  try {
    const json meta = json::parse(side);
    out.family = meta.at("family").get<std::string>();
    out.mapping = meta.value("mapping", std::string("identity"));
    out.params = meta.at("params").get<std::map<std::string, double>>();
    out.true_mi = meta.at("true_mi").get<double>();
    out.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("dataset sidecar: ") + e.what());
  }
  return out;
}

}  // namespace mienf::synthetic
