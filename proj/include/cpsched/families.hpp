// Copyright 2026 The cpsched Authors
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

#ifndef CPSCHED_FAMILIES_HPP
#define CPSCHED_FAMILIES_HPP

#include "cpsched/flat.hpp"
#include "cpsched/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpsched::families {

enum class Family { JobShop, FlowShop, Rcpsp, FlexibleJobShop };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

/// Job-shop and flow-shop data: one row per job, one entry per operation.
struct ShopData {
  Matrix durations;
  Matrix machines;
};

struct RcpspData {
  std::vector<Value> durations;
  std::vector<std::pair<Value, Value>> precedences;
  std::vector<Value> capacities;
  Matrix requests; // task x resource
};

/// Flexible job-shop: durations[op][machine] is -1 when the machine cannot
/// run the operation. setups[m][a][b] is the gap between an operation of type
/// a and one of type b on machine m (empty: no setups).
struct FlexData {
  Matrix durations;
  std::vector<std::pair<Value, Value>> precedences;
  std::vector<Value> types;
  std::vector<Matrix> setups;
};

struct Instance {
  Family family = Family::JobShop;
  std::string name;
  ShopData shop;
  RcpspData rcpsp;
  FlexData flex;
};

/// Parses a schema-1 JSON instance. Throws ParseError.
Instance parse_instance(std::string_view json_text);
Instance load_instance(const std::string &path);

/// Scheduling formulation built with intervals, sequences and cumul functions.
Model build_model(const Instance &inst);

/// Hand-flattened classical formulation over start variables only.
flat::Model build_classical(const Instance &inst);

} // namespace cpsched::families

#endif // CPSCHED_FAMILIES_HPP
