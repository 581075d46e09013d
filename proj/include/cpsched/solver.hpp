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

#ifndef CPSCHED_SOLVER_HPP
#define CPSCHED_SOLVER_HPP

#include "cpsched/flat.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cpsched::solver {

struct Budget {
  std::optional<std::uint64_t> max_nodes;
  std::optional<std::int64_t> max_millis;
};

/// Depth-first branch and bound with propagation. Variables are branched in
/// a static smallest-domain-first order, values ascending.
flat::Solution solve(const flat::Model &m, const Budget &budget = {});

/// Every satisfying assignment, in lexicographic variable/value order.
/// Throws SearchSpaceTooLarge when the product of domain sizes exceeds cap.
std::vector<std::vector<Value>> enumerate_all(const flat::Model &m, std::uint64_t cap);

} // namespace cpsched::solver

#endif // CPSCHED_SOLVER_HPP
