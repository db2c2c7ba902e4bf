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

#include <string>

#include "json.hpp"

#include "flows/flow.hpp"

namespace mienf::flows {

inline constexpr int kFlowFormatVersion = 1;

// Versioned JSON blob; doubles round-trip exactly.
nlohmann::json flow_to_json(const CompositeFlow& flow);
CompositeFlow flow_from_json(const nlohmann::json& j);

std::string serialize_flow(const CompositeFlow& flow);
CompositeFlow deserialize_flow(const std::string& text);

}  // namespace mienf::flows
