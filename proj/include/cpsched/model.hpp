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

#ifndef CPSCHED_MODEL_HPP
#define CPSCHED_MODEL_HPP

#include "cpsched/constraints.hpp"
#include "cpsched/error.hpp"
#include "cpsched/expr.hpp"
#include "cpsched/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cpsched {

/// Constructor arguments of an interval. `end` and `length` may be left
/// unset; `size` may reference an existing integer variable.
struct IntervalSpec {
  std::string id;
  IntDomain start{0, 0};
  std::optional<IntDomain> end;
  std::variant<IntDomain, IntVarId> size = IntDomain{0};
  std::optional<IntDomain> length;
  bool optional = false;
  std::optional<IntensityProfile> intensity;
};

/// An interval after construction: every domain is narrowed so that each
/// bound is supported by some (start, size, length) with end = start + length.
struct IntervalVar {
  std::string id;
  IntDomain start;
  IntDomain end;
  IntDomain size;
  IntDomain length;
  bool optional = false;
  std::optional<IntVarId> size_var;
  std::optional<IntensityProfile> intensity;

  [[nodiscard]] bool scaled() const { return intensity.has_value(); }
};

/// Builds and narrows an interval whose size is a plain domain. Throws
/// EmptyDomain or BadIntensity.
IntervalVar make_interval(const IntervalSpec &spec);

/// Bounds-consistent narrowing of end = start + size (size >= 0). Returns
/// false when a domain empties. Idempotent.
bool narrow_plain(IntDomain &start, IntDomain &end, IntDomain &size);

/// Every (start, size, length) with start in `start`, size in `size`,
/// length in `length`, start + length in `end`, and
/// sum_{t=start}^{start+length-1} intensity(t) = size * granularity.
/// A size-0 task admits only length 0. Sorted lexicographically.
std::vector<std::array<Value, 3>>
intensity_tuples(const IntensityProfile &profile, IntDomain start,
                 IntDomain size, IntDomain length, IntDomain end);

struct SequenceVar {
  std::string id;
  std::vector<IntervalId> intervals;
  std::vector<Value> types;

  [[nodiscard]] std::size_t size() const { return intervals.size(); }
  [[nodiscard]] std::optional<std::size_t> position(IntervalId x) const;
  /// next_arg of the last interval / prev_arg of the first.
  [[nodiscard]] Value boundary_sentinel() const;
  [[nodiscard]] Value absent_sentinel() const { return boundary_sentinel() + 1; }
};

struct StateFunction {
  std::string id;
  IntDomain state_domain;
};

/// Plain integer decision variable for mixing low-level constraints.
struct IntVar {
  std::string id;
  IntDomain domain;
};

enum class Sense { Minimize, Maximize };

struct Objective {
  Sense sense = Sense::Minimize;
  ScalarExpr expr;
};

class Model {
public:
  IntervalId new_interval(const IntervalSpec &spec);
  SequenceId new_sequence(std::string id, std::vector<IntervalId> intervals,
                          std::optional<std::vector<Value>> types = {});
  StateId new_state_function(std::string id, IntDomain state_domain);
  IntVarId new_int_var(std::string id, IntDomain domain);

  const ConstraintRecord &post(ConstraintRecord record);
  void minimize(ScalarExpr expr);
  void maximize(ScalarExpr expr);

  [[nodiscard]] const std::vector<IntervalVar> &intervals() const { return intervals_; }
  [[nodiscard]] const std::vector<SequenceVar> &sequences() const { return sequences_; }
  [[nodiscard]] const std::vector<StateFunction> &states() const { return states_; }
  [[nodiscard]] const std::vector<IntVar> &int_vars() const { return int_vars_; }
  [[nodiscard]] const std::vector<ConstraintRecord> &constraints() const {
    return constraints_;
  }
  [[nodiscard]] const std::optional<Objective> &objective() const { return objective_; }

  [[nodiscard]] const IntervalVar &interval(IntervalId x) const;
  [[nodiscard]] const SequenceVar &sequence(SequenceId s) const;
  [[nodiscard]] const StateFunction &state(StateId f) const;
  [[nodiscard]] const IntVar &int_var(IntVarId v) const;

  [[nodiscard]] std::optional<IntervalId> find_interval(std::string_view id) const;
  [[nodiscard]] std::optional<SequenceId> find_sequence(std::string_view id) const;

  /// Inclusive upper bound on time values: the override when set, else the
  /// largest start/end upper bound.
  [[nodiscard]] Value horizon() const;
  void set_horizon(Value h) { horizon_ = h; }
  /// Lower end of the model time range: min(0, smallest start lb).
  [[nodiscard]] Value time_origin() const;

  /// Throws UnknownInterval / UnknownObject for dangling references.
  void require(IntervalId x) const;
  void require(SequenceId s) const;
  void require(StateId f) const;
  void require(const References &refs) const;

private:
  void claim_id(const std::string &id);

  std::vector<IntervalVar> intervals_;
  std::vector<SequenceVar> sequences_;
  std::vector<StateFunction> states_;
  std::vector<IntVar> int_vars_;
  std::vector<ConstraintRecord> constraints_;
  std::optional<Objective> objective_;
  std::optional<Value> horizon_;
  std::vector<std::string> ids_;
};

// Posting helpers.

inline const ConstraintRecord &post_precedence(Model &m, PrecedenceKind kind,
                                               IntervalId a, IntervalId b,
                                               Value delay = 0) {
  return m.post(make_precedence(m, kind, a, b, delay));
}
inline const ConstraintRecord &end_before_start(Model &m, IntervalId a,
                                                IntervalId b, Value delay = 0) {
  return post_precedence(m, PrecedenceKind::EndBeforeStart, a, b, delay);
}
inline const ConstraintRecord &post_span(Model &m, IntervalId main,
                                         std::vector<IntervalId> subs) {
  return m.post(make_span(m, main, std::move(subs)));
}
inline const ConstraintRecord &post_alternative(Model &m, IntervalId main,
                                                std::vector<IntervalId> alts,
                                                Value cardinality = 1) {
  return m.post(make_alternative(m, main, std::move(alts), cardinality));
}
inline const ConstraintRecord &post_synchronize(Model &m, IntervalId main,
                                                std::vector<IntervalId> ivs) {
  return m.post(make_synchronize(m, main, std::move(ivs)));
}
inline const ConstraintRecord &
post_seq_no_overlap(Model &m, SequenceId seq,
                    std::optional<Matrix> transitions = {},
                    bool is_direct = false) {
  return m.post(make_seq_no_overlap(m, seq, std::move(transitions), is_direct));
}
inline const ConstraintRecord &
post_sequence_order(Model &m, SeqOrderKind kind, SequenceId seq, IntervalId a,
                    std::optional<IntervalId> b = {}) {
  return m.post(make_sequence_order(m, kind, seq, a, b));
}
inline const ConstraintRecord &post_same_sequence(Model &m, SameSeqKind kind,
                                                  SequenceId s1, SequenceId s2) {
  return m.post(make_same_sequence(m, kind, s1, s2));
}
inline const ConstraintRecord &post_cumul_bound(Model &m, CumulBoundKind kind,
                                                CumulExpr cumul,
                                                CumulWindow window, Value lo,
                                                Value hi) {
  return m.post(make_cumul_bound(m, kind, std::move(cumul), window, lo, hi));
}
/// cumul <= cap at every time point.
inline const ConstraintRecord &post_cumul_le(Model &m, CumulExpr cumul,
                                             Value cap) {
  const Value lo = std::min(cumul.min_possible(), cap);
  return post_cumul_bound(m, CumulBoundKind::CumulRange, std::move(cumul),
                          AllTime{}, lo, cap);
}
inline const ConstraintRecord &post_state(Model &m, StateKind kind,
                                          StateId func, IntervalId x,
                                          Value v1 = 0, Value v2 = 0) {
  return m.post(make_state(m, kind, func, x, v1, v2));
}
inline const ConstraintRecord &post_forbid(Model &m, ForbidKind kind,
                                           IntervalId x,
                                           std::vector<Period> periods) {
  return m.post(make_forbid(m, kind, x, std::move(periods)));
}
inline const ConstraintRecord &post_presence(Model &m, PresenceKind kind,
                                             std::vector<IntervalId> xs,
                                             Value k = 0) {
  return m.post(make_presence(m, kind, std::move(xs), k));
}
inline const ConstraintRecord &post_if_present_then(Model &m, IntervalId x,
                                                    ConstraintRecord inner) {
  return m.post(make_if_present_then(m, x, std::move(inner)));
}
inline const ConstraintRecord &
post_overlap(Model &m, OverlapKind kind, std::vector<IntervalId> xs,
             Value min = 0, std::optional<Matrix> transitions = {},
             std::vector<Value> types = {}) {
  return m.post(make_overlap(m, kind, std::move(xs), min,
                             std::move(transitions), std::move(types)));
}
inline const ConstraintRecord &post_chain(Model &m, std::vector<IntervalId> xs,
                                          std::vector<Value> delays,
                                          bool strict = false) {
  return m.post(make_chain(m, std::move(xs), std::move(delays), strict));
}
inline const ConstraintRecord &post_bounds(Model &m, BoundsKind kind,
                                           IntervalId x, Value t1,
                                           Value t2 = 0) {
  return m.post(make_bounds(m, kind, x, t1, t2));
}
inline const ConstraintRecord &post_raw(Model &m, BoolExpr expr) {
  return m.post(make_raw(m, std::move(expr)));
}

} // namespace cpsched

#endif // CPSCHED_MODEL_HPP
