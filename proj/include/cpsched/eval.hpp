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

#ifndef CPSCHED_EVAL_HPP
#define CPSCHED_EVAL_HPP

#include "cpsched/model.hpp"

#include <compare>
#include <vector>

namespace cpsched {

struct IntervalValue {
  bool present = true;
  Value start = 0;
  Value end = 0;
  Value size = 0;
  Value length = 0;

  friend auto operator<=>(const IntervalValue &, const IntervalValue &) = default;
};

/// Total assignment of interval attributes (indexed like Model::intervals)
/// and of the model's integer variables.
struct Assignment {
  std::vector<IntervalValue> intervals;
  std::vector<Value> int_vars;

  [[nodiscard]] const IntervalValue &operator[](IntervalId x) const {
    return intervals.at(x.index);
  }

  friend auto operator<=>(const Assignment &, const Assignment &) = default;
};

/// Present members of a sequence in canonical order: by start, then end,
/// then position in the sequence.
std::vector<IntervalId> sequence_order(const Model &m, SequenceId seq,
                                       const Assignment &asn);

Value eval_scalar(const Model &m, const ScalarExpr &e, const Assignment &asn);
bool eval_bool(const Model &m, const BoolExpr &e, const Assignment &asn);

/// Profile value at time t.
Value profile_at(const CumulExpr &cumul, const Assignment &asn, Value t);

/// True when every interval value lies in its domains and satisfies the
/// interval's own equations (end = start + length, length = size or the
/// intensity relation). Absent intervals are not checked.
bool well_formed(const Model &m, const Assignment &asn);

/// Direct semantic check of one record. State records are checked in
/// isolation (a timeline must exist for this record alone).
bool holds(const Model &m, const ConstraintRecord &rec, const Assignment &asn);

/// guard => formula. Throws BadArgument when the record has no formula.
bool holds_formula(const Model &m, const ConstraintRecord &rec,
                   const Assignment &asn);

/// Whether some state timeline satisfies all the given state records of one
/// function simultaneously.
bool state_timeline_exists(const Model &m, StateId func,
                           const std::vector<const rec::State *> &records,
                           const Assignment &asn);

/// well_formed, every constraint (state records jointly per function).
bool satisfies(const Model &m, const Assignment &asn);

} // namespace cpsched

#endif // CPSCHED_EVAL_HPP
