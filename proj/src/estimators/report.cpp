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
#include <iomanip>
#include <limits>
#include <ostream>

#include "estimators/mienf.hpp"
#include "json.hpp"

namespace mienf::estimators {

namespace {

using nlohmann::json;

// JSON has no NaN; absent values are written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string EstimationReport::to_json() const {
  json trace_rows = json::array();
  for (const auto& tp : trace)
    trace_rows.push_back({{"epoch", tp.epoch}, {"loglik", number_or_null(tp.loglik)},
                          {"estimate", number_or_null(tp.estimate)}});
  json j{{"estimator", estimator},
         {"point", point},
         {"ci_low", ci_low},
         {"ci_high", ci_high},
         {"ci_level", ci_level},
         {"averaged_epochs", averaged_epochs},
         {"final_estimate", final_estimate},
         {"final_loglik", number_or_null(final_loglik)},
         {"holdout_loglik", number_or_null(holdout_loglik)},
         {"kld_lower_bound", kld_lower_bound},
         {"samples", samples},
         {"epochs", epochs},
         {"seconds", seconds},
         {"component_mi", component_mi},
         {"trace", std::move(trace_rows)}};
  return j.dump(2);
}

EstimationReport EstimationReport::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EstimationReport r;
    r.estimator = j.at("estimator").get<std::string>();
    r.point = j.at("point").get<double>();
    r.ci_low = j.at("ci_low").get<double>();
    r.ci_high = j.at("ci_high").get<double>();
    r.ci_level = j.at("ci_level").get<double>();
    r.averaged_epochs = j.at("averaged_epochs").get<std::size_t>();
    r.final_estimate = j.at("final_estimate").get<double>();
    r.final_loglik = number_from(j.at("final_loglik"));
    r.holdout_loglik = number_from(j.at("holdout_loglik"));
    r.kld_lower_bound = j.at("kld_lower_bound").get<double>();
    r.samples = j.at("samples").get<std::size_t>();
    r.epochs = j.at("epochs").get<std::size_t>();
    r.seconds = j.at("seconds").get<double>();
    r.component_mi = j.at("component_mi").get<Vector>();
    for (const auto& t : j.at("trace"))
      r.trace.push_back({t.at("epoch").get<std::size_t>(), number_from(t.at("loglik")),
                         number_from(t.at("estimate"))});
    return r;
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("estimation report: ") + e.what());
  }
}

void EstimationReport::write_trace_csv(std::ostream& out) const {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "epoch,loglik,estimate\n";
  for (const auto& tp : trace) out << tp.epoch << ',' << tp.loglik << ',' << tp.estimate << '\n';
  out.precision(old);
}

}  // namespace mienf::estimators
