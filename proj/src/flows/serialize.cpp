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

#include "flows/serialize.hpp"

namespace mienf::flows {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

json layer_to_json(const Layer& layer) {
  return std::visit(
      Overloaded{
          [](const Standardize& l) {
            return json{{"type", "standardize"}, {"mean", l.mean()}, {"scale", l.scale()}};
          },
          [](const FixedAffine& l) {
            return json{{"type", "fixed_affine"},
                        {"mean", l.mean()},
                        {"map", l.map().values()},
                        {"inverse_map", l.inverse_map().values()}};
          },
          [](const DiagonalAffine& l) {
            return json{{"type", "diagonal_affine"},
                        {"dim", l.dim()},
                        {"params", Vector(l.parameters().begin(), l.parameters().end())}};
          },
          [](const TanhResidual& l) {
            return json{{"type", "tanh_residual"},
                        {"dim", l.dim()},
                        {"params", Vector(l.parameters().begin(), l.parameters().end())}};
          },
          [](const AffineCoupling& l) {
            return json{{"type", "affine_coupling"},
                        {"dim", l.dim()},
                        {"split", l.split()},
                        {"scale_clamp", l.scale_clamp()},
                        {"widths", l.conditioner().widths()},
                        {"leaky_slope", l.conditioner().leaky_slope()},
                        {"params", Vector(l.parameters().begin(), l.parameters().end())}};
          },
          [](const Swap& l) { return json{{"type", "swap"}, {"dim", l.dim()}, {"shift", l.shift()}}; }},
      layer);
}

void copy_params(const json& j, std::span<double> dst) {
  const auto values = j.at("params").get<Vector>();
  require(values.size() == dst.size(), ErrorCode::kParseError, "flow blob: parameter count mismatch");
  std::copy(values.begin(), values.end(), dst.begin());
}

Layer layer_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "standardize") {
    return Standardize(j.at("mean").get<Vector>(), j.at("scale").get<Vector>());
  }
  if (type == "fixed_affine") {
    auto mean = j.at("mean").get<Vector>();
    const std::size_t d = mean.size();
    return FixedAffine(std::move(mean), Matrix(d, d, j.at("map").get<Vector>()),
                       Matrix(d, d, j.at("inverse_map").get<Vector>()));
  }
  if (type == "diagonal_affine") {
    DiagonalAffine l(j.at("dim").get<std::size_t>());
    copy_params(j, l.mutable_parameters());
    return l;
  }
  if (type == "tanh_residual") {
    TanhResidual l(j.at("dim").get<std::size_t>());
    copy_params(j, l.mutable_parameters());
    return l;
  }
  if (type == "affine_coupling") {
    nn::Mlp mlp(j.at("widths").get<std::vector<std::size_t>>(), j.at("leaky_slope").get<double>());
    copy_params(j, mlp.mutable_parameters());
    return AffineCoupling(j.at("dim").get<std::size_t>(), j.at("split").get<std::size_t>(),
                          std::move(mlp), j.at("scale_clamp").get<double>());
  }
  if (type == "swap") {
    return Swap(j.at("dim").get<std::size_t>(), j.at("shift").get<std::size_t>());
  }
  raise(ErrorCode::kParseError, "flow blob: unknown layer type '" + type + "'");
}

}  // namespace

json flow_to_json(const CompositeFlow& flow) {
  json layers = json::array();
  for (const auto& layer : flow.layers()) layers.push_back(layer_to_json(layer));
  return json{{"format", "mienf-flow"}, {"version", kFlowFormatVersion}, {"dim", flow.dim()},
              {"layers", std::move(layers)}};
}

CompositeFlow flow_from_json(const json& j) {
  try {
    require(j.at("format").get<std::string>() == "mienf-flow", ErrorCode::kParseError,
            "flow blob: wrong format tag");
    require(j.at("version").get<int>() == kFlowFormatVersion, ErrorCode::kParseError,
            "flow blob: unsupported version");
    std::vector<Layer> layers;
    for (const auto& lj : j.at("layers")) layers.push_back(layer_from_json(lj));
    return CompositeFlow(j.at("dim").get<std::size_t>(), std::move(layers));
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("flow blob: ") + e.what());
  }
}

std::string serialize_flow(const CompositeFlow& flow) { return flow_to_json(flow).dump(); }

CompositeFlow deserialize_flow(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("flow blob: ") + e.what());
  }
  return flow_from_json(j);
}

}  // namespace mienf::flows
