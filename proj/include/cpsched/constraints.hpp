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

#ifndef CPSCHED_CONSTRAINTS_HPP
#define CPSCHED_CONSTRAINTS_HPP

#include "cpsched/expr.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cpsched {

class Model;

using Matrix = std::vector<std::vector<Value>>;
using Period = std::pair<Value, Value>;

enum class PrecedenceKind {
  StartAtStart,
  StartAtEnd,
  EndAtStart,
  EndAtEnd,
  StartBeforeStart,
  StartBeforeEnd,
  EndBeforeStart,
  EndBeforeEnd,
};
enum class GroupingKind { Span, Alternative, Synchronize };
enum class SeqOrderKind { First, Last, Before, Previous };
enum class SameSeqKind { SameSequence, SameCommonSubsequence };
enum class CumulBoundKind { CumulRange, AlwaysIn };
enum class StateKind {
  AlwaysEqual,
  AlwaysIn,
  AlwaysConstant,
  AlwaysNoState,
  RequiresState,
  SetsState,
};
enum class ForbidKind { Start, End, Extent };
enum class PresenceKind {
  Implies,
  Or,
  Xor,
  AllOrNone,
  OrAll,
  IfPresentThen,
  AtLeastK,
  AtMostK,
  ExactlyK,
};
enum class OverlapKind { MustOverlap, OverlapAtLeast, NoOverlapPairwise, Disjunctive };
enum class BoundsKind { ReleaseDate, Deadline, TimeWindow };

/// Time window of a cumul bound: whole model time range, the extent of an
/// interval, or a fixed half-open range [first, second).
struct AllTime {};
using CumulWindow = std::variant<AllTime, IntervalId, Period>;

struct ConstraintRecord;

namespace rec {

struct Precedence {
  PrecedenceKind kind{};
  IntervalId a{};
  IntervalId b{};
  Value delay = 0;
};
struct Grouping {
  GroupingKind kind{};
  IntervalId main{};
  std::vector<IntervalId> children;
  Value cardinality = 1;
};
struct SeqNoOverlap {
  SequenceId seq{};
  std::optional<Matrix> transitions;
  bool is_direct = false;
};
struct SequenceOrder {
  SeqOrderKind kind{};
  SequenceId seq{};
  IntervalId a{};
  std::optional<IntervalId> b;
};
struct SameSequence {
  SameSeqKind kind{};
  SequenceId first{};
  SequenceId second{};
};
struct CumulBound {
  CumulBoundKind kind{};
  CumulExpr cumul;
  CumulWindow window;
  Value lo = 0;
  Value hi = 0;
};
struct State {
  StateKind kind{};
  StateId func{};
  IntervalId interval{};
  Value v1 = 0; // value / min / before
  Value v2 = 0; // max / after
};
struct Forbid {
  ForbidKind kind{};
  IntervalId interval{};
  std::vector<Period> periods;
};
struct Presence {
  PresenceKind kind{};
  std::vector<IntervalId> intervals;
  Value k = 0;
  std::shared_ptr<const ConstraintRecord> inner; // IfPresentThen only
};
struct Overlap {
  OverlapKind kind{};
  std::vector<IntervalId> intervals;
  Value min = 0;
  std::optional<Matrix> transitions;
  std::vector<Value> types; // type per interval, defaults to position
};
struct Chain {
  std::vector<IntervalId> intervals;
  std::vector<Value> delays;
  bool strict = false;
};
struct Bounds {
  BoundsKind kind{};
  IntervalId interval{};
  Value t1 = 0;
  Value t2 = 0;
};
/// Low-level constraint over accessors and int vars.
struct Raw {
  BoolExpr expr;
};

} // namespace rec

/// A posted constraint. `formula` is the closed defining formula when the
/// constraint has one (it does not quantify over time or sequence order);
/// it holds whenever some literal of `guard` is absent.
struct ConstraintRecord {
  std::variant<rec::Precedence, rec::Grouping, rec::SeqNoOverlap,
               rec::SequenceOrder, rec::SameSequence, rec::CumulBound,
               rec::State, rec::Forbid, rec::Presence, rec::Overlap,
               rec::Chain, rec::Bounds, rec::Raw>
      payload;
  std::vector<IntervalId> guard;
  std::optional<BoolExpr> formula;

  [[nodiscard]] std::string name() const;
};

std::string_view to_string(PrecedenceKind k);

// Builders validate arguments against the model and return the record
// without posting it; Model::post stores it.
ConstraintRecord make_precedence(const Model &m, PrecedenceKind kind,
                                 IntervalId a, IntervalId b, Value delay = 0);
ConstraintRecord make_span(const Model &m, IntervalId main,
                           std::vector<IntervalId> subs);
ConstraintRecord make_alternative(const Model &m, IntervalId main,
                                  std::vector<IntervalId> alts,
                                  Value cardinality = 1);
ConstraintRecord make_synchronize(const Model &m, IntervalId main,
                                  std::vector<IntervalId> ivs);
ConstraintRecord make_seq_no_overlap(const Model &m, SequenceId seq,
                                     std::optional<Matrix> transitions = {},
                                     bool is_direct = false);
ConstraintRecord make_sequence_order(const Model &m, SeqOrderKind kind,
                                     SequenceId seq, IntervalId a,
                                     std::optional<IntervalId> b = {});
ConstraintRecord make_same_sequence(const Model &m, SameSeqKind kind,
                                    SequenceId s1, SequenceId s2);
ConstraintRecord make_cumul_bound(const Model &m, CumulBoundKind kind,
                                  CumulExpr cumul, CumulWindow window,
                                  Value lo, Value hi);
ConstraintRecord make_state(const Model &m, StateKind kind, StateId func,
                            IntervalId interval, Value v1 = 0, Value v2 = 0);
ConstraintRecord make_forbid(const Model &m, ForbidKind kind,
                             IntervalId interval, std::vector<Period> periods);
ConstraintRecord make_presence(const Model &m, PresenceKind kind,
                               std::vector<IntervalId> intervals, Value k = 0);
ConstraintRecord make_if_present_then(const Model &m, IntervalId x,
                                      ConstraintRecord inner);
ConstraintRecord make_overlap(const Model &m, OverlapKind kind,
                              std::vector<IntervalId> intervals, Value min = 0,
                              std::optional<Matrix> transitions = {},
                              std::vector<Value> types = {});
ConstraintRecord make_chain(const Model &m, std::vector<IntervalId> intervals,
                            std::vector<Value> delays, bool strict = false);
ConstraintRecord make_bounds(const Model &m, BoundsKind kind,
                             IntervalId interval, Value t1, Value t2 = 0);
ConstraintRecord make_raw(const Model &m, BoolExpr expr);

} // namespace cpsched

#endif // CPSCHED_CONSTRAINTS_HPP
