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

#include "cpsched/eval.hpp"

#include <algorithm>
#include <numeric>

namespace cpsched {

namespace {

Value attr_value(const IntervalValue &v, Attr a) {
  switch (a) {
  case Attr::Start: return v.start;
  case Attr::End: return v.end;
  case Attr::Size: return v.size;
  case Attr::Length: return v.length;
  case Attr::Presence: return v.present ? 1 : 0;
  }
  return 0;
}

Value checked_div(Value a, Value b) {
  if (b == 0)
    throw Error(ErrorCode::DivisionByZero, "division by zero");
  return a / b;
}

struct Evaluator {
  const Model &m;
  const Assignment &asn;

  Value scalar(const ScalarExpr &e) const {
    return std::visit([&](const auto &n) { return eval(n); }, e.node().v);
  }

  bool boolean(const BoolExpr &e) const {
    return std::visit([&](const auto &n) { return eval(n); }, e.node().v);
  }

  Value eval(const node::Const &n) const { return n.value; }

  Value eval(const node::Accessor &n) const {
    const auto &v = asn[n.interval];
    if (n.raw || n.attr == Attr::Presence || v.present)
      return attr_value(v, n.attr);
    return n.absent_value;
  }

  Value eval(const node::SeqAccessor &n) const {
    const auto &seq = m.sequence(n.seq);
    if (!seq.position(n.interval))
      throw Error(ErrorCode::NotInSequence, m.interval(n.interval).id);
    const bool arg = is_arg(n.attr);
    if (!asn[n.interval].present)
      return n.absent_value.value_or(arg ? seq.absent_sentinel() : 0);
    const auto order = sequence_order(m, n.seq, asn);
    const auto rank = static_cast<std::size_t>(
        std::find(order.begin(), order.end(), n.interval) - order.begin());
    std::optional<IntervalId> other;
    if (is_next(n.attr) && rank + 1 < order.size())
      other = order[rank + 1];
    if (!is_next(n.attr) && rank > 0)
      other = order[rank - 1];
    if (!other)
      return n.boundary_value.value_or(arg ? seq.boundary_sentinel() : 0);
    if (arg)
      return seq.types[*seq.position(*other)];
    return attr_value(asn[*other], neighbour_attr(n.attr));
  }

  Value eval(const node::Arith &n) const {
    std::vector<Value> xs;
    for (const auto &a : n.args)
      xs.push_back(scalar(a));
    switch (n.op) {
    case ArithOp::Add: return std::accumulate(xs.begin(), xs.end(), Value{0});
    case ArithOp::Sub: return xs[0] - xs[1];
    case ArithOp::Mul:
      return std::accumulate(xs.begin(), xs.end(), Value{1}, std::multiplies<>());
    case ArithOp::Div: return checked_div(xs[0], xs[1]);
    case ArithOp::Abs: return xs[0] < 0 ? -xs[0] : xs[0];
    case ArithOp::Min: return *std::min_element(xs.begin(), xs.end());
    case ArithOp::Max: return *std::max_element(xs.begin(), xs.end());
    }
    return 0;
  }

  Value eval(const node::Element &n) const {
    const Value i = scalar(n.index[0]);
    const auto v = n.array->lookup(i);
    if (!v)
      throw Error(ErrorCode::IndexOutOfRange, "element index " + std::to_string(i));
    return *v;
  }

  Value eval(const node::Element2D &n) const {
    const Value r = scalar(n.index[0]);
    const Value c = scalar(n.index[1]);
    const auto v = n.matrix->lookup(r, c);
    if (!v)
      throw Error(ErrorCode::IndexOutOfRange,
                  "element2d index " + std::to_string(r) + "," + std::to_string(c));
    return *v;
  }

  Value eval(const node::Aggregate &n) const {
    std::vector<const IntervalValue *> present;
    for (auto x : n.intervals)
      if (asn[x].present)
        present.push_back(&asn[x]);
    if (n.kind == AggKind::CountPresent)
      return static_cast<Value>(present.size());
    if (present.empty())
      return 0;
    Value lo = present.front()->start, hi = present.front()->end;
    for (const auto *v : present) {
      lo = std::min(lo, v->start);
      hi = std::max(hi, v->end);
    }
    switch (n.kind) {
    case AggKind::EarliestStart: return lo;
    case AggKind::LatestEnd:
    case AggKind::Makespan: return hi;
    case AggKind::SpanLength: return hi - lo;
    default: return 0;
    }
  }

  Value eval(const node::Height &n) const {
    const auto &v = asn[n.interval];
    if (!v.present)
      return n.absent_value;
    return profile_at(*n.cumul, asn, n.at_end ? v.end : v.start);
  }

  Value eval(const node::IntVar &n) const { return asn.int_vars.at(n.var.index); }

  bool eval(const node::Cmp &n) const {
    const Value a = scalar(n.lhs);
    const Value b = scalar(n.rhs);
    switch (n.op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
    }
    return false;
  }

  bool eval(const node::Logic &n) const {
    switch (n.op) {
    case node::Logic::Op::And:
      return std::all_of(n.args.begin(), n.args.end(),
                         [&](const BoolExpr &a) { return boolean(a); });
    case node::Logic::Op::Or:
      return std::any_of(n.args.begin(), n.args.end(),
                         [&](const BoolExpr &a) { return boolean(a); });
    case node::Logic::Op::Xor: {
      bool parity = false;
      for (const auto &a : n.args)
        parity ^= boolean(a);
      return parity;
    }
    }
    return false;
  }

  bool eval(const node::Not &n) const { return !boolean(n.arg); }
  bool eval(const node::PresenceLit &n) const { return asn[n.interval].present; }
  bool eval(const node::BoolConst &n) const { return n.value; }
};

bool present(const Assignment &asn, IntervalId x) { return asn[x].present; }

Value transition(const std::optional<Matrix> &d, Value ti, Value tj) {
  return d ? (*d)[static_cast<std::size_t>(ti)][static_cast<std::size_t>(tj)] : 0;
}

bool pairwise_ok(const std::vector<IntervalId> &xs, const std::vector<Value> &types,
                 const std::optional<Matrix> &d, const Assignment &asn) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (!present(asn, xs[i]) || !present(asn, xs[j]))
        continue;
      const auto &a = asn[xs[i]];
      const auto &b = asn[xs[j]];
      if (!(a.end + transition(d, types[i], types[j]) <= b.start ||
            b.end + transition(d, types[j], types[i]) <= a.start))
        return false;
    }
  return true;
}

bool holds_precedence(const rec::Precedence &p, const Assignment &asn) {
  if (!present(asn, p.a) || !present(asn, p.b))
    return true;
  const auto &a = asn[p.a];
  const auto &b = asn[p.b];
  switch (p.kind) {
  case PrecedenceKind::StartAtStart: return b.start == a.start + p.delay;
  case PrecedenceKind::StartAtEnd: return b.start == a.end + p.delay;
  case PrecedenceKind::EndAtStart: return a.end == b.start + p.delay;
  case PrecedenceKind::EndAtEnd: return b.end == a.end + p.delay;
  case PrecedenceKind::StartBeforeStart: return b.start >= a.start + p.delay;
  case PrecedenceKind::StartBeforeEnd: return b.end >= a.start + p.delay;
  case PrecedenceKind::EndBeforeStart: return b.start >= a.end + p.delay;
  case PrecedenceKind::EndBeforeEnd: return b.end >= a.end + p.delay;
  }
  return false;
}

bool holds_grouping(const rec::Grouping &g, const Assignment &asn) {
  const auto &main = asn[g.main];
  std::vector<const IntervalValue *> on;
  for (auto x : g.children)
    if (present(asn, x))
      on.push_back(&asn[x]);
  switch (g.kind) {
  case GroupingKind::Span: {
    if (main.present != !on.empty())
      return false;
    if (!main.present)
      return true;
    Value lo = on.front()->start, hi = on.front()->end;
    for (const auto *v : on) {
      lo = std::min(lo, v->start);
      hi = std::max(hi, v->end);
    }
    return main.start == lo && main.end == hi;
  }
  case GroupingKind::Alternative:
    if (!main.present)
      return on.empty();
    if (static_cast<Value>(on.size()) != g.cardinality)
      return false;
    return std::all_of(on.begin(), on.end(), [&](const IntervalValue *v) {
      return v->start == main.start && v->end == main.end;
    });
  case GroupingKind::Synchronize:
    if (!main.present)
      return true;
    return std::all_of(on.begin(), on.end(), [&](const IntervalValue *v) {
      return v->start == main.start && v->end == main.end;
    });
  }
  return false;
}

bool holds_sequence_order(const Model &m, const rec::SequenceOrder &o,
                          const Assignment &asn) {
  const auto &seq = m.sequence(o.seq);
  if (!present(asn, o.a))
    return true;
  const auto &a = asn[o.a];
  switch (o.kind) {
  case SeqOrderKind::First:
  case SeqOrderKind::Last:
    for (auto x : seq.intervals) {
      if (x == o.a || !present(asn, x))
        continue;
      if (o.kind == SeqOrderKind::First ? a.start > asn[x].start : a.end < asn[x].end)
        return false;
    }
    return true;
  case SeqOrderKind::Before:
    return !present(asn, *o.b) || a.end <= asn[*o.b].start;
  case SeqOrderKind::Previous: {
    if (!present(asn, *o.b))
      return true;
    const auto &b = asn[*o.b];
    if (a.end > b.start)
      return false;
    for (auto x : seq.intervals) {
      if (x == o.a || x == *o.b || !present(asn, x))
        continue;
      if (a.end <= asn[x].start && asn[x].end <= b.start)
        return false;
    }
    return true;
  }
  }
  return false;
}

bool holds_same_sequence(const Model &m, const rec::SameSequence &s,
                         const Assignment &asn) {
  const auto o1 = sequence_order(m, s.first, asn);
  const auto o2 = sequence_order(m, s.second, asn);
  const auto &q1 = m.sequence(s.first);
  const auto &q2 = m.sequence(s.second);
  if (s.kind == SameSeqKind::SameSequence) {
    for (std::size_t r = 0; r < o1.size(); ++r) {
      if (!q2.position(o1[r]))
        continue;
      const auto it = std::find(o2.begin(), o2.end(), o1[r]);
      if (static_cast<std::size_t>(it - o2.begin()) != r)
        return false;
    }
    return true;
  }
  std::vector<IntervalId> c1, c2;
  for (auto x : o1)
    if (q2.position(x))
      c1.push_back(x);
  for (auto x : o2)
    if (q1.position(x))
      c2.push_back(x);
  return c1 == c2;
}

bool holds_cumul(const Model &m, const rec::CumulBound &c, const Assignment &asn) {
  Value lo = m.time_origin(), hi = m.horizon() + 1; // [lo, hi)
  if (const auto *x = std::get_if<IntervalId>(&c.window)) {
    if (!present(asn, *x))
      return true;
    lo = asn[*x].start;
    hi = asn[*x].end;
  } else if (const auto *p = std::get_if<Period>(&c.window)) {
    lo = std::max(lo, p->first);
    hi = std::min(hi, p->second);
  }
  for (Value t = lo; t < hi; ++t) {
    const Value v = profile_at(c.cumul, asn, t);
    if (v < c.lo || v > c.hi)
      return false;
  }
  return true;
}

bool holds_forbid(const rec::Forbid &f, const Assignment &asn) {
  if (!present(asn, f.interval))
    return true;
  const auto &x = asn[f.interval];
  for (const auto &[a, b] : f.periods) {
    switch (f.kind) {
    case ForbidKind::Start:
      if (a <= x.start && x.start < b)
        return false;
      break;
    case ForbidKind::End:
      if (a < x.end && x.end <= b)
        return false;
      break;
    case ForbidKind::Extent:
      if (std::max(a, x.start) < std::min(b, x.end))
        return false;
      break;
    }
  }
  return true;
}

bool holds_presence(const Model &m, const rec::Presence &p, const Assignment &asn) {
  Value count = 0;
  for (auto x : p.intervals)
    count += present(asn, x) ? 1 : 0;
  const auto n = static_cast<Value>(p.intervals.size());
  switch (p.kind) {
  case PresenceKind::Implies:
    return !present(asn, p.intervals[0]) || present(asn, p.intervals[1]);
  case PresenceKind::Or: return count >= 1;
  case PresenceKind::Xor: return count == 1;
  case PresenceKind::AllOrNone: return count == 0 || count == n;
  case PresenceKind::OrAll: return count >= 1;
  case PresenceKind::IfPresentThen:
    return !present(asn, p.intervals[0]) || holds(m, *p.inner, asn);
  case PresenceKind::AtLeastK: return count >= p.k;
  case PresenceKind::AtMostK: return count <= p.k;
  case PresenceKind::ExactlyK: return count == p.k;
  }
  return false;
}

bool holds_overlap(const rec::Overlap &o, const Assignment &asn) {
  switch (o.kind) {
  case OverlapKind::MustOverlap:
  case OverlapKind::OverlapAtLeast: {
    if (!present(asn, o.intervals[0]) || !present(asn, o.intervals[1]))
      return true;
    const auto &a = asn[o.intervals[0]];
    const auto &b = asn[o.intervals[1]];
    if (o.kind == OverlapKind::MustOverlap)
      return a.start < b.end && b.start < a.end;
    return std::min(a.end, b.end) - std::max(a.start, b.start) >= o.min;
  }
  case OverlapKind::NoOverlapPairwise:
  case OverlapKind::Disjunctive:
    return pairwise_ok(o.intervals, o.types, o.transitions, asn);
  }
  return false;
}

bool holds_chain(const rec::Chain &c, const Assignment &asn) {
  for (std::size_t i = 0; i + 1 < c.intervals.size(); ++i) {
    if (!present(asn, c.intervals[i]) || !present(asn, c.intervals[i + 1]))
      continue;
    const Value lhs = asn[c.intervals[i]].end + c.delays[i];
    const Value rhs = asn[c.intervals[i + 1]].start;
    if (c.strict ? lhs != rhs : lhs > rhs)
      return false;
  }
  return true;
}

bool holds_bounds(const rec::Bounds &b, const Assignment &asn) {
  if (!present(asn, b.interval))
    return true;
  const auto &x = asn[b.interval];
  switch (b.kind) {
  case BoundsKind::ReleaseDate: return x.start >= b.t1;
  case BoundsKind::Deadline: return x.end <= b.t1;
  case BoundsKind::TimeWindow: return x.start >= b.t1 && x.end <= b.t2;
  }
  return false;
}

} // namespace

std::vector<IntervalId> sequence_order(const Model &m, SequenceId seq,
                                       const Assignment &asn) {
  const auto &sv = m.sequence(seq);
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < sv.intervals.size(); ++i)
    if (asn[sv.intervals[i]].present)
      pos.push_back(i);
  std::sort(pos.begin(), pos.end(), [&](std::size_t i, std::size_t j) {
    const auto &a = asn[sv.intervals[i]];
    const auto &b = asn[sv.intervals[j]];
    return std::tie(a.start, a.end, i) < std::tie(b.start, b.end, j);
  });
  std::vector<IntervalId> out;
  for (auto i : pos)
    out.push_back(sv.intervals[i]);
  return out;
}

Value eval_scalar(const Model &m, const ScalarExpr &e, const Assignment &asn) {
  return Evaluator{m, asn}.scalar(e);
}

bool eval_bool(const Model &m, const BoolExpr &e, const Assignment &asn) {
  return Evaluator{m, asn}.boolean(e);
}

Value profile_at(const CumulExpr &cumul, const Assignment &asn, Value t) {
  Value v = 0;
  for (const auto &term : cumul.terms()) {
    switch (term.kind) {
    case CumulTerm::Kind::Pulse: {
      const auto &x = asn[term.interval];
      if (x.present && x.start <= t && t < x.end)
        v += term.height;
      break;
    }
    case CumulTerm::Kind::StepAt:
      if (term.time <= t)
        v += term.height;
      break;
    case CumulTerm::Kind::StepAtStart:
      if (asn[term.interval].present && asn[term.interval].start <= t)
        v += term.height;
      break;
    case CumulTerm::Kind::StepAtEnd:
      if (asn[term.interval].present && asn[term.interval].end <= t)
        v += term.height;
      break;
    }
  }
  return v;
}

bool well_formed(const Model &m, const Assignment &asn) {
  if (asn.intervals.size() != m.intervals().size() ||
      asn.int_vars.size() != m.int_vars().size())
    return false;
  for (std::size_t v = 0; v < m.int_vars().size(); ++v)
    if (!m.int_vars()[v].domain.contains(asn.int_vars[v]))
      return false;
  const Value origin = m.time_origin();
  const Value horizon = m.horizon();
  for (std::size_t i = 0; i < m.intervals().size(); ++i) {
    const auto &iv = m.intervals()[i];
    const auto &x = asn.intervals[i];
    if (!x.present) {
      if (!iv.optional)
        return false;
      continue;
    }
    if (!iv.start.contains(x.start) || !iv.end.contains(x.end) ||
        !iv.size.contains(x.size) || !iv.length.contains(x.length))
      return false;
    if (x.start < origin || x.end > horizon || x.end != x.start + x.length)
      return false;
    if (iv.size_var && asn.int_vars[iv.size_var->index] != x.size)
      return false;
    if (iv.intensity) {
      if (x.size == 0 ? x.length != 0
                      : integrate(*iv.intensity, x.start, x.length) !=
                            x.size * iv.intensity->granularity)
        return false;
    } else if (x.length != x.size) {
      return false;
    }
  }
  return true;
}

bool holds(const Model &m, const ConstraintRecord &rec, const Assignment &asn) {
  return std::visit(
      [&](const auto &p) -> bool {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, rec::Precedence>) {
          return holds_precedence(p, asn);
        } else if constexpr (std::is_same_v<P, rec::Grouping>) {
          return holds_grouping(p, asn);
        } else if constexpr (std::is_same_v<P, rec::SeqNoOverlap>) {
          const auto &seq = m.sequence(p.seq);
          if (!p.is_direct || !p.transitions)
            return pairwise_ok(seq.intervals, seq.types, p.transitions, asn);
          if (!pairwise_ok(seq.intervals, seq.types, std::nullopt, asn))
            return false;
          const auto order = sequence_order(m, p.seq, asn);
          for (std::size_t r = 0; r + 1 < order.size(); ++r) {
            const Value tu = seq.types[*seq.position(order[r])];
            const Value tv = seq.types[*seq.position(order[r + 1])];
            if (asn[order[r]].end + transition(p.transitions, tu, tv) >
                asn[order[r + 1]].start)
              return false;
          }
          return true;
        } else if constexpr (std::is_same_v<P, rec::SequenceOrder>) {
          return holds_sequence_order(m, p, asn);
        } else if constexpr (std::is_same_v<P, rec::SameSequence>) {
          return holds_same_sequence(m, p, asn);
        } else if constexpr (std::is_same_v<P, rec::CumulBound>) {
          return holds_cumul(m, p, asn);
        } else if constexpr (std::is_same_v<P, rec::State>) {
          return state_timeline_exists(m, p.func, {&p}, asn);
        } else if constexpr (std::is_same_v<P, rec::Forbid>) {
          return holds_forbid(p, asn);
        } else if constexpr (std::is_same_v<P, rec::Presence>) {
          return holds_presence(m, p, asn);
        } else if constexpr (std::is_same_v<P, rec::Overlap>) {
          return holds_overlap(p, asn);
        } else if constexpr (std::is_same_v<P, rec::Chain>) {
          return holds_chain(p, asn);
        } else if constexpr (std::is_same_v<P, rec::Bounds>) {
          return holds_bounds(p, asn);
        } else {
          return eval_bool(m, p.expr, asn);
        }
      },
      rec.payload);
}

bool holds_formula(const Model &m, const ConstraintRecord &rec,
                   const Assignment &asn) {
  if (!rec.formula)
    throw Error(ErrorCode::BadArgument, rec.name() + " has no closed formula");
  for (auto g : rec.guard)
    if (!asn[g].present)
      return true;
  return eval_bool(m, *rec.formula, asn);
}

bool state_timeline_exists(const Model &m, StateId func,
                           const std::vector<const rec::State *> &records,
                           const Assignment &asn) {
  const auto dom = m.state(func).state_domain;
  const Value origin = m.time_origin();
  const Value horizon = m.horizon();
  const auto points = static_cast<std::size_t>(horizon - origin + 1);
  const auto width = static_cast<std::size_t>(dom.size() + 1); // last slot = none
  const std::size_t none = width - 1;
  std::vector<std::vector<char>> allowed(points, std::vector<char>(width, 1));
  std::vector<std::size_t> parent(points);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i)
      i = parent[i] = parent[parent[i]];
    return i;
  };
  auto restrict_to = [&](Value t, auto keep) {
    if (t < origin || t > horizon)
      return;
    auto &a = allowed[static_cast<std::size_t>(t - origin)];
    for (std::size_t k = 0; k < width; ++k)
      if (!keep(k))
        a[k] = 0;
  };
  auto state_slot = [&](Value v) { return static_cast<std::size_t>(v - dom.lb); };

  for (const auto *r : records) {
    const auto &x = asn[r->interval];
    if (!x.present)
      continue;
    for (Value t = x.start; t < x.end; ++t) {
      switch (r->kind) {
      case StateKind::AlwaysEqual:
      case StateKind::RequiresState:
        restrict_to(t, [&](std::size_t k) { return k == state_slot(r->v1); });
        break;
      case StateKind::AlwaysIn:
        restrict_to(t, [&](std::size_t k) {
          return k != none && k >= state_slot(r->v1) && k <= state_slot(r->v2);
        });
        break;
      case StateKind::AlwaysNoState:
        restrict_to(t, [&](std::size_t k) { return k == none; });
        break;
      case StateKind::AlwaysConstant:
        if (t + 1 < x.end && t >= origin && t + 1 <= horizon)
          parent[find(static_cast<std::size_t>(t - origin))] =
              find(static_cast<std::size_t>(t + 1 - origin));
        break;
      default:
        break;
      }
    }
    if (r->kind == StateKind::SetsState) {
      restrict_to(x.start, [&](std::size_t k) { return k == state_slot(r->v1); });
      restrict_to(x.end, [&](std::size_t k) { return k == state_slot(r->v2); });
    }
  }
  std::vector<std::vector<char>> joint(points, std::vector<char>(width, 1));
  for (std::size_t t = 0; t < points; ++t) {
    auto &j = joint[find(t)];
    for (std::size_t k = 0; k < width; ++k)
      j[k] = static_cast<char>(j[k] && allowed[t][k]);
  }
  for (std::size_t t = 0; t < points; ++t)
    if (find(t) == t && std::none_of(joint[t].begin(), joint[t].end(),
                                     [](char c) { return c != 0; }))
      return false;
  return true;
}

bool satisfies(const Model &m, const Assignment &asn) {
  if (!well_formed(m, asn))
    return false;
  std::vector<std::vector<const rec::State *>> per_function(m.states().size());
  for (const auto &r : m.constraints()) {
    if (const auto *s = std::get_if<rec::State>(&r.payload)) {
      per_function[s->func.index].push_back(s);
      continue;
    }
    if (!holds(m, r, asn))
      return false;
  }
  for (std::size_t f = 0; f < per_function.size(); ++f)
    if (!per_function[f].empty() &&
        !state_timeline_exists(m, StateId{f}, per_function[f], asn))
      return false;
  return true;
}

} // namespace cpsched
