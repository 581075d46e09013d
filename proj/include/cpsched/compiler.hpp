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

#ifndef CPSCHED_COMPILER_HPP
#define CPSCHED_COMPILER_HPP

#include "cpsched/eval.hpp"
#include "cpsched/flat.hpp"
#include "cpsched/model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace cpsched {

enum class NoOverlapStrategy { Auto, Pairwise, UnaryCumulative };

std::string_view to_string(NoOverlapStrategy s);
std::optional<NoOverlapStrategy> parse_strategy(std::string_view s);

struct CompileOptions {
  NoOverlapStrategy strategy = NoOverlapStrategy::Auto;
  std::optional<Value> horizon_override;
  std::size_t max_extension_tuples = 1'000'000;
};

struct LoweredInterval {
  flat::VarIndex s = 0;
  flat::VarIndex e = 0;
  flat::VarIndex l = 0;
  flat::VarIndex sz = 0;
  std::optional<flat::VarIndex> p; // unset for mandatory intervals
};

/// Order encoding of a sequence. pos is the rank among present members (n
/// when absent). nxt/prv hold the member position of the neighbour, n for
/// none (last/first) and n + 1 when absent.
struct LoweredSequence {
  std::vector<flat::VarIndex> pos;
  std::vector<flat::VarIndex> nxt;
  std::vector<flat::VarIndex> prv;
};

struct CompiledModel {
  flat::Model flat;
  std::vector<LoweredInterval> intervals;
  std::vector<flat::VarIndex> int_vars;
  std::vector<std::optional<LoweredSequence>> sequences;
  Value origin = 0;
  Value horizon = 0;
};

CompiledModel compile_model(const Model &m, const CompileOptions &opts = {});

/// Interval and integer-variable values read back from a flat assignment.
Assignment decode(const CompiledModel &c, const std::vector<Value> &asn);

/// Same as decode with the attributes of absent intervals zeroed, so that
/// decoded solutions can be compared as sets.
Assignment decode_normalized(const CompiledModel &c, const std::vector<Value> &asn);

/// (p1 = 0) or ... or (pk = 0) or phi.
flat::Expr guard(const std::vector<flat::Expr> &presences, flat::Expr phi);

/// Feasible (start, size, length) tuples of a scaled interval whose end is
/// capped at horizon. Throws TupleExplosion beyond max_tuples.
std::vector<std::vector<Value>> intensity_table(const IntervalVar &iv, Value horizon,
                                                std::size_t max_tuples);

} // namespace cpsched

#endif // CPSCHED_COMPILER_HPP
