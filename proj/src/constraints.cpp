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

#include "cpsched/constraints.hpp"

#include "cpsched/model.hpp"

#include <algorithm>

namespace cpsched {

namespace {

ScalarExpr S(IntervalId x) { return raw_attr(Attr::Start, x); }
ScalarExpr E(IntervalId x) { return raw_attr(Attr::End, x); }

std::vector<IntervalId> optional_among(const Model &m,
                                       std::initializer_list<IntervalId> xs) {
  std::vector<IntervalId> out;
  for (auto x : xs)
    if (m.interval(x).optional &&
        std::find(out.begin(), out.end(), x) == out.end())
      out.push_back(x);
  return out;
}

/// (all optional members of xs present) => phi
BoolExpr guarded(const Model &m, std::initializer_list<IntervalId> xs,
                 BoolExpr phi) {
  std::vector<BoolExpr> lits;
  for (auto x : optional_among(m, xs))
    lits.push_back(presence_lit(x));
  if (lits.empty())
    return phi;
  return implies(all_of(std::move(lits)), phi);
}

void require_all(const Model &m, const std::vector<IntervalId> &xs) {
  for (auto x : xs)
    m.require(x);
}

void require_distinct(const std::vector<IntervalId> &xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j])
        throw Error(ErrorCode::DuplicateInterval, "interval listed twice");
}

void validate_transitions(const Matrix &d, const std::vector<Value> &types) {
  Value max_type = -1;
  for (Value t : types)
    max_type = std::max(max_type, t);
  if (static_cast<Value>(d.size()) < max_type + 1)
    throw Error(ErrorCode::BadTransitionMatrix, "matrix smaller than type range");
  for (const auto &row : d)
    if (row.size() != d.size())
      throw Error(ErrorCode::BadTransitionMatrix, "matrix is not square");
}

Value gap(const std::optional<Matrix> &d, Value ti, Value tj) {
  if (!d)
    return 0;
  return (*d)[static_cast<std::size_t>(ti)][static_cast<std::size_t>(tj)];
}

/// Pairwise non-overlap with optional transition gaps, guarded per pair.
BoolExpr pairwise_disjunction(const Model &m, const std::vector<IntervalId> &xs,
                              const std::vector<Value> &types,
                              const std::optional<Matrix> &d) {
  std::vector<BoolExpr> parts;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const Value dij = gap(d, types[i], types[j]);
      const Value dji = gap(d, types[j], types[i]);
      parts.push_back(guarded(m, {xs[i], xs[j]},
                              E(xs[i]) + dij <= S(xs[j]) ||
                                  E(xs[j]) + dji <= S(xs[i])));
    }
  return all_of(std::move(parts));
}

std::vector<Value> positional(std::size_t n) {
  std::vector<Value> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = static_cast<Value>(i);
  return t;
}

/// Canonical "x comes before y" for sequence order: start, end, then
/// position (a constant decided by the caller).
BoolExpr canonical_before(IntervalId x, IntervalId y, bool x_first_on_tie) {
  return S(x) < S(y) ||
         (S(x) == S(y) && (E(x) < E(y) || (E(x) == E(y) && BoolExpr(x_first_on_tie))));
}

ConstraintRecord record(auto payload, std::vector<IntervalId> guard,
                        std::optional<BoolExpr> formula) {
  ConstraintRecord r;
  r.payload = std::move(payload);
  r.guard = std::move(guard);
  r.formula = std::move(formula);
  return r;
}

} // namespace

std::string_view to_string(PrecedenceKind k) {
  switch (k) {
  case PrecedenceKind::StartAtStart: return "start_at_start";
  case PrecedenceKind::StartAtEnd: return "start_at_end";
  case PrecedenceKind::EndAtStart: return "end_at_start";
  case PrecedenceKind::EndAtEnd: return "end_at_end";
  case PrecedenceKind::StartBeforeStart: return "start_before_start";
  case PrecedenceKind::StartBeforeEnd: return "start_before_end";
  case PrecedenceKind::EndBeforeStart: return "end_before_start";
  case PrecedenceKind::EndBeforeEnd: return "end_before_end";
  }
  return "precedence";
}

std::string ConstraintRecord::name() const {
  return std::visit(
      [](const auto &p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, rec::Precedence>) {
          return std::string(to_string(p.kind));
        } else if constexpr (std::is_same_v<P, rec::Grouping>) {
          constexpr const char *names[] = {"span", "alternative", "synchronize"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::SeqNoOverlap>) {
          return "seq_no_overlap";
        } else if constexpr (std::is_same_v<P, rec::SequenceOrder>) {
          constexpr const char *names[] = {"first", "last", "before", "previous"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::SameSequence>) {
          return p.kind == SameSeqKind::SameSequence ? "same_sequence"
                                                     : "same_common_subsequence";
        } else if constexpr (std::is_same_v<P, rec::CumulBound>) {
          return p.kind == CumulBoundKind::CumulRange ? "cumul_range" : "always_in";
        } else if constexpr (std::is_same_v<P, rec::State>) {
          constexpr const char *names[] = {"always_equal",    "always_in",
                                           "always_constant", "always_no_state",
                                           "requires_state",  "sets_state"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::Forbid>) {
          constexpr const char *names[] = {"forbid_start", "forbid_end", "forbid_extent"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::Presence>) {
          constexpr const char *names[] = {
              "presence_implies",     "presence_or",         "presence_xor",
              "all_present_or_all_absent", "presence_or_all", "if_present_then",
              "at_least_k_present",   "at_most_k_present",   "exactly_k_present"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::Overlap>) {
          constexpr const char *names[] = {"must_overlap", "overlap_at_least",
                                           "no_overlap_pairwise", "disjunctive"};
          return names[static_cast<int>(p.kind)];
        } else if constexpr (std::is_same_v<P, rec::Chain>) {
          return p.strict ? "strict_chain" : "chain";
        } else if constexpr (std::is_same_v<P, rec::Bounds>) {
          constexpr const char *names[] = {"release_date", "deadline", "time_window"};
          return names[static_cast<int>(p.kind)];
        } else {
          return "raw";
        }
      },
      payload);
}

ConstraintRecord make_precedence(const Model &m, PrecedenceKind kind,
                                 IntervalId a, IntervalId b, Value delay) {
  m.require(a);
  m.require(b);
  BoolExpr phi(true);
  switch (kind) {
  case PrecedenceKind::StartAtStart: phi = S(b) == S(a) + delay; break;
  case PrecedenceKind::StartAtEnd: phi = S(b) == E(a) + delay; break;
  case PrecedenceKind::EndAtStart: phi = E(a) == S(b) + delay; break;
  case PrecedenceKind::EndAtEnd: phi = E(b) == E(a) + delay; break;
  case PrecedenceKind::StartBeforeStart: phi = S(b) >= S(a) + delay; break;
  case PrecedenceKind::StartBeforeEnd: phi = E(b) >= S(a) + delay; break;
  case PrecedenceKind::EndBeforeStart: phi = S(b) >= E(a) + delay; break;
  case PrecedenceKind::EndBeforeEnd: phi = E(b) >= E(a) + delay; break;
  }
  return record(rec::Precedence{kind, a, b, delay}, optional_among(m, {a, b}),
                std::move(phi));
}

ConstraintRecord make_span(const Model &m, IntervalId main,
                           std::vector<IntervalId> subs) {
  m.require(main);
  require_all(m, subs);
  if (subs.empty())
    throw Error(ErrorCode::EmptyChildren, "span without subtasks");
  require_distinct(subs);
  std::vector<BoolExpr> parts, first, last;
  for (auto x : subs) {
    parts.push_back(implies(presence_lit(x), presence_lit(main) &&
                                                 S(main) <= S(x) && E(x) <= E(main)));
    first.push_back(presence_lit(x) && S(x) == S(main));
    last.push_back(presence_lit(x) && E(x) == E(main));
  }
  parts.push_back(implies(presence_lit(main), any_of(std::move(first))));
  parts.push_back(implies(presence_lit(main), any_of(std::move(last))));
  return record(rec::Grouping{GroupingKind::Span, main, std::move(subs), 1}, {},
                all_of(std::move(parts)));
}

ConstraintRecord make_alternative(const Model &m, IntervalId main,
                                  std::vector<IntervalId> alts, Value cardinality) {
  m.require(main);
  require_all(m, alts);
  if (alts.empty())
    throw Error(ErrorCode::EmptyChildren, "alternative without alternatives");
  require_distinct(alts);
  if (cardinality < 1 || cardinality > static_cast<Value>(alts.size()))
    throw Error(ErrorCode::BadCardinality, "cardinality outside [1, |alts|]");
  std::vector<ScalarExpr> ps;
  std::vector<BoolExpr> parts;
  for (auto x : alts) {
    ps.push_back(presence_of(x));
    parts.push_back(implies(presence_lit(x), S(x) == S(main) && E(x) == E(main)));
  }
  const ScalarExpr count = sum_of(ps);
  parts.push_back(implies(presence_lit(main), count == cardinality));
  parts.push_back(implies(!presence_lit(main), count == Value{0}));
  return record(rec::Grouping{GroupingKind::Alternative, main, std::move(alts), cardinality},
                {}, all_of(std::move(parts)));
}

ConstraintRecord make_synchronize(const Model &m, IntervalId main,
                                  std::vector<IntervalId> ivs) {
  m.require(main);
  require_all(m, ivs);
  if (ivs.empty())
    throw Error(ErrorCode::EmptyChildren, "synchronize without intervals");
  std::vector<BoolExpr> parts;
  for (auto x : ivs)
    parts.push_back(guarded(m, {x}, S(x) == S(main) && E(x) == E(main)));
  return record(rec::Grouping{GroupingKind::Synchronize, main, std::move(ivs), 1},
                optional_among(m, {main}), all_of(std::move(parts)));
}

ConstraintRecord make_seq_no_overlap(const Model &m, SequenceId seq,
                                     std::optional<Matrix> transitions,
                                     bool is_direct) {
  const auto &sv = m.sequence(seq);
  if (transitions)
    validate_transitions(*transitions, sv.types);
  std::optional<BoolExpr> formula;
  if (!is_direct || !transitions)
    formula = pairwise_disjunction(m, sv.intervals, sv.types, transitions);
  return record(rec::SeqNoOverlap{seq, std::move(transitions), is_direct}, {},
                std::move(formula));
}

ConstraintRecord make_sequence_order(const Model &m, SeqOrderKind kind,
                                     SequenceId seq, IntervalId a,
                                     std::optional<IntervalId> b) {
  const auto &sv = m.sequence(seq);
  m.require(a);
  if (!sv.position(a))
    throw Error(ErrorCode::NotInSequence, m.interval(a).id + " not in " + sv.id);
  const bool binary = kind == SeqOrderKind::Before || kind == SeqOrderKind::Previous;
  if (binary) {
    if (!b)
      throw Error(ErrorCode::BadArgument, "before/previous need two intervals");
    m.require(*b);
    if (!sv.position(*b))
      throw Error(ErrorCode::NotInSequence, m.interval(*b).id + " not in " + sv.id);
    if (*b == a)
      throw Error(ErrorCode::BadArgument, "before/previous on the same interval");
  }
  std::vector<BoolExpr> parts;
  std::vector<IntervalId> guard;
  switch (kind) {
  case SeqOrderKind::First:
  case SeqOrderKind::Last:
    for (auto x : sv.intervals) {
      if (x == a)
        continue;
      parts.push_back(guarded(m, {x}, kind == SeqOrderKind::First ? S(a) <= S(x)
                                                                  : E(a) >= E(x)));
    }
    guard = optional_among(m, {a});
    break;
  case SeqOrderKind::Before:
    parts.push_back(E(a) <= S(*b));
    guard = optional_among(m, {a, *b});
    break;
  case SeqOrderKind::Previous:
    parts.push_back(E(a) <= S(*b));
    for (auto x : sv.intervals) {
      if (x == a || x == *b)
        continue;
      parts.push_back(!(presence_lit(x) && E(a) <= S(x) && E(x) <= S(*b)));
    }
    guard = optional_among(m, {a, *b});
    break;
  }
  return record(rec::SequenceOrder{kind, seq, a, b}, std::move(guard),
                all_of(std::move(parts)));
}

ConstraintRecord make_same_sequence(const Model &m, SameSeqKind kind,
                                    SequenceId s1, SequenceId s2) {
  const auto &q1 = m.sequence(s1);
  const auto &q2 = m.sequence(s2);
  std::vector<IntervalId> common;
  for (auto x : q1.intervals)
    if (q2.position(x))
      common.push_back(x);
  if (common.empty())
    throw Error(ErrorCode::NoCommonIntervals, q1.id + " / " + q2.id);
  std::optional<BoolExpr> formula;
  if (kind == SameSeqKind::SameCommonSubsequence) {
    std::vector<BoolExpr> parts;
    for (std::size_t i = 0; i < common.size(); ++i)
      for (std::size_t j = i + 1; j < common.size(); ++j) {
        const auto x = common[i];
        const auto y = common[j];
        const bool tie1 = *q1.position(x) < *q1.position(y);
        const bool tie2 = *q2.position(x) < *q2.position(y);
        if (tie1 == tie2)
          continue; // both orders break ties the same way
        parts.push_back(guarded(m, {x, y},
                                !xor_of({canonical_before(x, y, tie1),
                                         canonical_before(x, y, tie2)})));
      }
    formula = all_of(std::move(parts));
  }
  return record(rec::SameSequence{kind, s1, s2}, {}, std::move(formula));
}

ConstraintRecord make_cumul_bound(const Model &m, CumulBoundKind kind,
                                  CumulExpr cumul, CumulWindow window, Value lo,
                                  Value hi) {
  if (lo > hi)
    throw Error(ErrorCode::BadBounds, "lo > hi");
  for (const auto &t : cumul.terms())
    if (t.kind != CumulTerm::Kind::StepAt)
      m.require(t.interval);
  std::vector<IntervalId> guard;
  if (kind == CumulBoundKind::CumulRange)
    window = AllTime{};
  else if (std::holds_alternative<AllTime>(window))
    throw Error(ErrorCode::BadWindow, "always_in needs an interval or a range");
  if (const auto *x = std::get_if<IntervalId>(&window)) {
    m.require(*x);
    guard = optional_among(m, {*x});
  }
  if (const auto *p = std::get_if<Period>(&window); p && p->first > p->second)
    throw Error(ErrorCode::BadWindow, "window start after end");
  return record(rec::CumulBound{kind, std::move(cumul), window, lo, hi},
                std::move(guard), std::nullopt);
}

ConstraintRecord make_state(const Model &m, StateKind kind, StateId func,
                            IntervalId interval, Value v1, Value v2) {
  const auto &f = m.state(func);
  m.require(interval);
  auto in_domain = [&](Value v) {
    if (!f.state_domain.contains(v))
      throw Error(ErrorCode::StateOutOfDomain, f.id + ": " + std::to_string(v));
  };
  switch (kind) {
  case StateKind::AlwaysEqual:
  case StateKind::RequiresState:
    in_domain(v1);
    break;
  case StateKind::AlwaysIn:
    in_domain(v1);
    in_domain(v2);
    if (v1 > v2)
      throw Error(ErrorCode::BadBounds, "state range min > max");
    break;
  case StateKind::SetsState:
    in_domain(v1);
    in_domain(v2);
    break;
  default:
    break;
  }
  return record(rec::State{kind, func, interval, v1, v2},
                optional_among(m, {interval}), std::nullopt);
}

ConstraintRecord make_forbid(const Model &m, ForbidKind kind,
                             IntervalId interval, std::vector<Period> periods) {
  m.require(interval);
  std::vector<BoolExpr> parts;
  const auto x = interval;
  for (const auto &[a, b] : periods) {
    if (a >= b)
      throw Error(ErrorCode::BadPeriod, "period start must precede its end");
    switch (kind) {
    case ForbidKind::Start: parts.push_back(S(x) < a || S(x) >= b); break;
    case ForbidKind::End: parts.push_back(E(x) <= a || E(x) > b); break;
    case ForbidKind::Extent: parts.push_back(E(x) <= S(x) || E(x) <= a || S(x) >= b); break;
    }
  }
  return record(rec::Forbid{kind, interval, std::move(periods)},
                optional_among(m, {interval}), all_of(std::move(parts)));
}

ConstraintRecord make_presence(const Model &m, PresenceKind kind,
                               std::vector<IntervalId> intervals, Value k) {
  require_all(m, intervals);
  const auto n = static_cast<Value>(intervals.size());
  std::vector<BoolExpr> lits;
  std::vector<ScalarExpr> ps;
  for (auto x : intervals) {
    lits.push_back(presence_lit(x));
    ps.push_back(presence_of(x));
  }
  BoolExpr phi(true);
  switch (kind) {
  case PresenceKind::Implies:
  case PresenceKind::Or:
  case PresenceKind::Xor:
    if (intervals.size() != 2)
      throw Error(ErrorCode::BadArgument, "binary presence constraint");
    phi = kind == PresenceKind::Implies ? implies(lits[0], lits[1])
          : kind == PresenceKind::Or    ? lits[0] || lits[1]
                                        : xor_of({lits[0], lits[1]});
    break;
  case PresenceKind::AllOrNone: {
    std::vector<BoolExpr> parts;
    for (std::size_t i = 1; i < lits.size(); ++i)
      parts.push_back(!xor_of({lits[0], lits[i]}));
    phi = all_of(std::move(parts));
    break;
  }
  case PresenceKind::OrAll:
    if (intervals.empty())
      throw Error(ErrorCode::EmptyChildren, "presence_or_all without intervals");
    phi = any_of(lits);
    break;
  case PresenceKind::AtLeastK:
  case PresenceKind::AtMostK:
  case PresenceKind::ExactlyK:
    if (k < 0 || k > n)
      throw Error(ErrorCode::BadK, "k outside [0, n]");
    phi = compare(kind == PresenceKind::AtLeastK  ? CmpOp::Ge
                  : kind == PresenceKind::AtMostK ? CmpOp::Le
                                                  : CmpOp::Eq,
                  sum_of(ps), k);
    break;
  case PresenceKind::IfPresentThen:
    throw Error(ErrorCode::BadArgument, "use make_if_present_then");
  }
  return record(rec::Presence{kind, std::move(intervals), k, nullptr}, {}, std::move(phi));
}

ConstraintRecord make_if_present_then(const Model &m, IntervalId x,
                                      ConstraintRecord inner) {
  m.require(x);
  if (!inner.formula)
    throw Error(ErrorCode::BadArgument,
                "if_present_then needs a constraint with a closed formula");
  std::vector<IntervalId> guard = optional_among(m, {x});
  for (auto g : inner.guard)
    if (std::find(guard.begin(), guard.end(), g) == guard.end())
      guard.push_back(g);
  auto formula = inner.formula;
  auto shared = std::make_shared<const ConstraintRecord>(std::move(inner));
  return record(rec::Presence{PresenceKind::IfPresentThen, {x}, 0, std::move(shared)},
                std::move(guard), std::move(formula));
}

ConstraintRecord make_overlap(const Model &m, OverlapKind kind,
                              std::vector<IntervalId> intervals, Value min,
                              std::optional<Matrix> transitions,
                              std::vector<Value> types) {
  require_all(m, intervals);
  if ((kind == OverlapKind::MustOverlap || kind == OverlapKind::OverlapAtLeast) &&
      intervals.size() != 2)
    throw Error(ErrorCode::BadArgument, "overlap constraints take two intervals");
  if (kind == OverlapKind::OverlapAtLeast && min < 1)
    throw Error(ErrorCode::BadMin, "min must be >= 1");
  if (types.empty())
    types = positional(intervals.size());
  if (types.size() != intervals.size())
    throw Error(ErrorCode::LengthMismatch, "disjunctive types");
  if (kind != OverlapKind::Disjunctive)
    transitions.reset();
  if (transitions)
    validate_transitions(*transitions, types);
  require_distinct(intervals);

  std::vector<IntervalId> guard;
  BoolExpr phi(true);
  switch (kind) {
  case OverlapKind::MustOverlap: {
    const auto a = intervals[0], b = intervals[1];
    phi = S(a) < E(b) && S(b) < E(a);
    guard = optional_among(m, {a, b});
    break;
  }
  case OverlapKind::OverlapAtLeast: {
    const auto a = intervals[0], b = intervals[1];
    phi = expr_min({E(a), E(b)}) - expr_max({S(a), S(b)}) >= min;
    guard = optional_among(m, {a, b});
    break;
  }
  case OverlapKind::NoOverlapPairwise:
  case OverlapKind::Disjunctive:
    phi = pairwise_disjunction(m, intervals, types, transitions);
    break;
  }
  return record(rec::Overlap{kind, std::move(intervals), min, std::move(transitions),
                             std::move(types)},
                std::move(guard), std::move(phi));
}

ConstraintRecord make_chain(const Model &m, std::vector<IntervalId> intervals,
                            std::vector<Value> delays, bool strict) {
  require_all(m, intervals);
  if (intervals.empty())
    throw Error(ErrorCode::EmptyChildren, "empty chain");
  if (delays.empty())
    delays.assign(intervals.size() - 1, 0);
  if (delays.size() + 1 != intervals.size())
    throw Error(ErrorCode::LengthMismatch, "chain needs |intervals| - 1 delays");
  std::vector<BoolExpr> parts;
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const auto a = intervals[i], b = intervals[i + 1];
    parts.push_back(guarded(m, {a, b},
                            strict ? E(a) + delays[i] == S(b) : E(a) + delays[i] <= S(b)));
  }
  return record(rec::Chain{std::move(intervals), std::move(delays), strict}, {},
                all_of(std::move(parts)));
}

ConstraintRecord make_bounds(const Model &m, BoundsKind kind, IntervalId interval,
                             Value t1, Value t2) {
  m.require(interval);
  BoolExpr phi(true);
  switch (kind) {
  case BoundsKind::ReleaseDate: phi = S(interval) >= t1; break;
  case BoundsKind::Deadline: phi = E(interval) <= t1; break;
  case BoundsKind::TimeWindow:
    if (t1 > t2)
      throw Error(ErrorCode::BadWindow, "earliest > latest");
    phi = S(interval) >= t1 && E(interval) <= t2;
    break;
  }
  return record(rec::Bounds{kind, interval, t1, t2}, optional_among(m, {interval}),
                std::move(phi));
}

ConstraintRecord make_raw(const Model &m, BoolExpr expr) {
  References refs;
  collect(expr, refs);
  m.require(refs);
  auto formula = expr;
  return record(rec::Raw{std::move(expr)}, {}, std::move(formula));
}

} // namespace cpsched
