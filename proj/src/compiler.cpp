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

#include "cpsched/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace cpsched {

using flat::Expr;
using flat::Op;
using flat::VarIndex;

std::string_view to_string(NoOverlapStrategy s) {
  switch (s) {
  case NoOverlapStrategy::Auto: return "auto";
  case NoOverlapStrategy::Pairwise: return "pairwise";
  case NoOverlapStrategy::UnaryCumulative: return "unary-cumulative";
  }
  return "";
}

std::optional<NoOverlapStrategy> parse_strategy(std::string_view s) {
  if (s == "auto")
    return NoOverlapStrategy::Auto;
  if (s == "pairwise")
    return NoOverlapStrategy::Pairwise;
  if (s == "unary-cumulative" || s == "unary_cumulative")
    return NoOverlapStrategy::UnaryCumulative;
  return std::nullopt;
}

Expr guard(const std::vector<Expr> &presences, Expr phi) {
  if (presences.empty())
    return phi;
  std::vector<Expr> parts;
  for (const auto &p : presences)
    parts.push_back(flat::eq(p, 0));
  parts.push_back(std::move(phi));
  return flat::make(Op::Or, std::move(parts));
}

std::vector<std::vector<Value>> intensity_table(const IntervalVar &iv, Value horizon,
                                                std::size_t max_tuples) {
  const IntDomain end = iv.end.intersect({iv.end.lb, horizon});
  std::vector<std::vector<Value>> out;
  if (end.empty())
    return out;
  for (const auto &[s, sz, l] :
       intensity_tuples(*iv.intensity, iv.start, iv.size, iv.length, end)) {
    if (out.size() == max_tuples)
      throw Error(ErrorCode::TupleExplosion,
                  iv.id + ": more than " + std::to_string(max_tuples) + " tuples");
    out.push_back({s, sz, l});
  }
  return out;
}

namespace {

std::string attr_suffix(Attr a) {
  switch (a) {
  case Attr::Start: return "s";
  case Attr::End: return "e";
  case Attr::Size: return "sz";
  case Attr::Length: return "l";
  case Attr::Presence: return "p";
  }
  return "";
}

/// Literal false that survives constant folding, so that an infeasible
/// posting is still visible in the flat model.
Expr falsum() {
  auto n = std::make_shared<flat::ExprNode>();
  n->op = Op::Eq;
  n->args = {Expr(0), Expr(1)};
  return Expr(std::move(n));
}

class Lowerer {
public:
  Lowerer(const Model &m, const CompileOptions &opts) : m_(m), opts_(opts) {
    if (opts.max_extension_tuples < 1)
      throw Error(ErrorCode::BadArgument, "max_extension_tuples must be >= 1");
    out_.origin = m.time_origin();
    out_.horizon = opts.horizon_override.value_or(m.horizon());
  }

  CompiledModel run() {
    for (const auto &v : m_.int_vars())
      out_.int_vars.push_back(add_var(v.id, v.domain));
    for (std::size_t i = 0; i < m_.intervals().size(); ++i)
      lower_interval(IntervalId{i});
    out_.sequences.resize(m_.sequences().size());
    for (auto s : sequences_needing_order())
      lower_sequence(s);
    lower_state_functions();
    for (const auto &r : m_.constraints())
      lower_record(r);
    if (const auto &obj = m_.objective())
      lower_objective(*obj);
    return std::move(out_);
  }

private:
  // --- variables ---------------------------------------------------------

  VarIndex add_var(const std::string &name, flat::Domain d, bool is_bool = false) {
    return out_.flat.add_var(name, std::move(d), is_bool);
  }

  std::string fresh(const std::string &base) {
    std::string name = base;
    for (int k = 2; out_.flat.find(name); ++k)
      name = base + "_" + std::to_string(k);
    return name;
  }

  VarIndex define(const std::string &base, const Expr &e) {
    if (e.is_var())
      return e.var();
    IntDomain b = flat::bounds(e, var_bounds());
    const VarIndex v = add_var(fresh(base), b);
    post(flat::eq(flat::var(v), e));
    return v;
  }

  std::vector<IntDomain> var_bounds() const {
    std::vector<IntDomain> b;
    b.reserve(out_.flat.vars.size());
    for (const auto &v : out_.flat.vars)
      b.push_back({v.domain.lb(), v.domain.ub()});
    return b;
  }

  void post(const Expr &e) {
    if (e.is_const()) {
      if (e.value() == 0)
        out_.flat.post(flat::Intension{falsum()});
      return;
    }
    out_.flat.post(flat::Intension{e});
  }

  /// Posts guard => phi, splitting a top-level conjunction.
  void post_guarded(const std::vector<Expr> &ps, const Expr &phi) {
    if (phi.op() == Op::And) {
      for (const auto &part : phi.args())
        post_guarded(ps, part);
      return;
    }
    post(guard(ps, phi));
  }

  const LoweredInterval &L(IntervalId x) const { return out_.intervals.at(x.index); }
  Expr s_of(IntervalId x) const { return flat::var(L(x).s); }
  Expr e_of(IntervalId x) const { return flat::var(L(x).e); }
  Expr l_of(IntervalId x) const { return flat::var(L(x).l); }
  Expr p_of(IntervalId x) const {
    return L(x).p ? flat::var(*L(x).p) : Expr(1);
  }
  Expr attr_of(IntervalId x, Attr a) const {
    switch (a) {
    case Attr::Start: return s_of(x);
    case Attr::End: return e_of(x);
    case Attr::Size: return flat::var(L(x).sz);
    case Attr::Length: return l_of(x);
    case Attr::Presence: return p_of(x);
    }
    return Expr(0);
  }
  std::vector<Expr> presences(const std::vector<IntervalId> &xs) const {
    std::vector<Expr> ps;
    for (auto x : xs)
      if (L(x).p)
        ps.push_back(flat::var(*L(x).p));
    return ps;
  }
  flat::Operand operand_of(VarIndex v) const {
    const auto &d = out_.flat.vars[v].domain;
    if (d.size() == 1)
      return flat::Operand::of_const(d.lb());
    return flat::Operand::of_var(v);
  }

  void lower_interval(IntervalId x) {
    const auto &iv = m_.interval(x);
    const Value origin = out_.origin;
    const Value horizon = out_.horizon;
    LoweredInterval li;
    const IntDomain window{origin, horizon};
    const IntDomain start = iv.start.intersect(window);
    const IntDomain end = iv.end.intersect(window);
    std::vector<std::vector<Value>> table;
    bool must_be_absent = false;
    if (iv.scaled()) {
      table = intensity_table(iv, horizon, opts_.max_extension_tuples);
      if (table.empty()) {
        if (!iv.optional)
          throw Error(ErrorCode::NoFeasibleTuple, iv.id + ": empty intensity table");
        must_be_absent = true;
      }
    }
    if (start.empty() || end.empty()) {
      if (!iv.optional)
        throw Error(ErrorCode::EmptyDomain, iv.id + ": outside the horizon");
      must_be_absent = true;
    }
    if (iv.optional)
      li.p = add_var(iv.id + "_p", must_be_absent ? IntDomain{0} : IntDomain{0, 1}, true);
    li.s = add_var(iv.id + "_s", start.empty() ? iv.start : start);
    li.sz = iv.size_var ? out_.int_vars[iv.size_var->index] : add_var(iv.id + "_sz", iv.size);
    li.l = add_var(iv.id + "_l", iv.length);
    li.e = add_var(iv.id + "_e", end.empty() ? iv.end : end);
    out_.intervals.push_back(li);

    post(flat::eq(flat::var(li.e), flat::add(flat::var(li.s), flat::var(li.l))));
    if (!iv.scaled())
      post(flat::eq(flat::var(li.l), flat::var(li.sz)));
    else if (!table.empty())
      out_.flat.post(flat::Extension{{li.s, li.sz, li.l}, std::move(table), true});
  }

  // --- sequences ---------------------------------------------------------

  std::vector<SequenceId> sequences_needing_order() const {
    std::set<std::size_t> need;
    auto scan = [&](const auto &expr) {
      References refs;
      collect(expr, refs);
      for (auto s : refs.sequences)
        need.insert(s.index);
    };
    for (const auto &r : m_.constraints()) {
      if (r.formula)
        scan(*r.formula);
      if (const auto *p = std::get_if<rec::SameSequence>(&r.payload);
          p && p->kind == SameSeqKind::SameSequence) {
        need.insert(p->first.index);
        need.insert(p->second.index);
      }
      if (const auto *p = std::get_if<rec::SeqNoOverlap>(&r.payload);
          p && p->is_direct && p->transitions)
        need.insert(p->seq.index);
    }
    if (m_.objective())
      scan(m_.objective()->expr);
    std::vector<SequenceId> out;
    for (auto i : need)
      out.push_back(SequenceId{i});
    return out;
  }

  /// x canonically before y: by start, then end, then sequence position.
  Expr before(IntervalId x, IntervalId y, bool x_first_on_tie) const {
    return flat::make(
        Op::Or,
        {flat::lt(s_of(x), s_of(y)),
         flat::make(Op::And,
                    {flat::eq(s_of(x), s_of(y)),
                     flat::make(Op::Or,
                                {flat::lt(e_of(x), e_of(y)),
                                 flat::make(Op::And, {flat::eq(e_of(x), e_of(y)),
                                                      Expr(x_first_on_tie ? 1 : 0)})})})});
  }

  Expr lit(IntervalId x) const { return L(x).p ? flat::eq(p_of(x), 1) : Expr(1); }

  void lower_sequence(SequenceId sid) {
    const auto &seq = m_.sequence(sid);
    const auto &xs = seq.intervals;
    const auto n = static_cast<Value>(xs.size());
    LoweredSequence ls;
    std::vector<Expr> present;
    for (auto x : xs)
      present.push_back(p_of(x));
    const Expr count = flat::make(Op::Add, present);

    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto &xid = m_.interval(xs[i]).id;
      const VarIndex pos = add_var(fresh(seq.id + "_" + xid + "_pos"), IntDomain{0, n});
      ls.pos.push_back(pos);
      std::vector<Expr> rank;
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (j != i)
          rank.push_back(flat::mul(p_of(xs[j]), before(xs[j], xs[i], j < i)));
      const Expr p = p_of(xs[i]);
      post(flat::eq(flat::var(pos),
                    flat::add(flat::mul(p, flat::make(Op::Add, rank)),
                              flat::mul(flat::sub(1, p), n))));
    }
    auto neighbours = [&](const std::string &suffix, bool next) {
      std::vector<VarIndex> vars;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<Value> dom;
        for (Value k = 0; k <= n + 1; ++k)
          if (k != static_cast<Value>(i) && (k != n + 1 || L(xs[i]).p))
            dom.push_back(k);
        const VarIndex v = add_var(fresh(seq.id + "_" + m_.interval(xs[i]).id + suffix),
                                   flat::Domain::of_values(dom));
        vars.push_back(v);
        const Expr pos_i = flat::var(ls.pos[i]);
        for (std::size_t j = 0; j < xs.size(); ++j) {
          if (j == i)
            continue;
          const Expr pos_j = flat::var(ls.pos[j]);
          const Expr adjacent = next ? flat::eq(pos_j, flat::add(pos_i, 1))
                                     : flat::eq(pos_i, flat::add(pos_j, 1));
          post(flat::eq(flat::eq(flat::var(v), static_cast<Value>(j)),
                        flat::make(Op::And, {lit(xs[i]), lit(xs[j]), adjacent})));
        }
        const Expr edge = next ? flat::eq(pos_i, flat::sub(count, 1)) : flat::eq(pos_i, 0);
        post(flat::eq(flat::eq(flat::var(v), n), flat::make(Op::And, {lit(xs[i]), edge})));
        if (L(xs[i]).p)
          post(flat::eq(flat::eq(flat::var(v), n + 1), flat::not_(lit(xs[i]))));
      }
      return vars;
    };
    ls.nxt = neighbours("_next", true);
    ls.prv = neighbours("_prev", false);
    out_.sequences[sid.index] = std::move(ls);
  }

  // --- state functions ---------------------------------------------------

  void lower_state_functions() {
    std::vector<std::vector<const rec::State *>> per(m_.states().size());
    for (const auto &r : m_.constraints())
      if (const auto *s = std::get_if<rec::State>(&r.payload))
        per[s->func.index].push_back(s);
    for (std::size_t f = 0; f < per.size(); ++f) {
      if (per[f].empty())
        continue;
      const auto &sf = m_.states()[f];
      const Value none = sf.state_domain.ub + 1;
      std::map<Value, VarIndex> at;
      for (Value t = out_.origin; t <= out_.horizon; ++t) {
        const std::string tag = t < 0 ? "m" + std::to_string(-t) : std::to_string(t);
        at[t] = add_var(fresh(sf.id + "_t" + tag), IntDomain{sf.state_domain.lb, none});
      }
      for (const auto *r : per[f])
        lower_state(*r, at, none);
    }
  }

  void lower_state(const rec::State &r, const std::map<Value, VarIndex> &at, Value none) {
    const auto x = r.interval;
    const auto ps = presences({x});
    const auto &iv = m_.interval(x);
    const Value lo = std::max(iv.start.lb, out_.origin);
    const Value hi = std::min(iv.end.ub, out_.horizon);
    for (Value t = lo; t <= hi; ++t) {
      const Expr f = flat::var(at.at(t));
      const Expr inside = flat::make(Op::And, {flat::le(s_of(x), t), flat::gt(e_of(x), t)});
      switch (r.kind) {
      case StateKind::AlwaysEqual:
      case StateKind::RequiresState:
        post(guard(ps, flat::make(Op::Or, {flat::not_(inside), flat::eq(f, r.v1)})));
        break;
      case StateKind::AlwaysIn:
        post(guard(ps, flat::make(Op::Or, {flat::not_(inside),
                                           flat::make(Op::And, {flat::ge(f, r.v1),
                                                                flat::le(f, r.v2)})})));
        break;
      case StateKind::AlwaysNoState:
        post(guard(ps, flat::make(Op::Or, {flat::not_(inside), flat::eq(f, none)})));
        break;
      case StateKind::AlwaysConstant:
        if (t + 1 <= out_.horizon) {
          const Expr both = flat::make(Op::And, {flat::le(s_of(x), t), flat::gt(e_of(x), t + 1)});
          post(guard(ps, flat::make(Op::Or, {flat::not_(both),
                                             flat::eq(f, flat::var(at.at(t + 1)))})));
        }
        break;
      case StateKind::SetsState:
        post(guard(ps, flat::make(Op::Or, {flat::ne(s_of(x), t), flat::eq(f, r.v1)})));
        post(guard(ps, flat::make(Op::Or, {flat::ne(e_of(x), t), flat::eq(f, r.v2)})));
        break;
      }
    }
  }

  // --- records -----------------------------------------------------------

  void lower_record(const ConstraintRecord &r) {
    if (const auto *p = std::get_if<rec::SeqNoOverlap>(&r.payload)) {
      lower_seq_no_overlap(*p);
      return;
    }
    if (const auto *p = std::get_if<rec::CumulBound>(&r.payload)) {
      lower_cumul(*p);
      return;
    }
    if (std::holds_alternative<rec::State>(r.payload))
      return; // lowered with its state function
    if (const auto *p = std::get_if<rec::SameSequence>(&r.payload);
        p && p->kind == SameSeqKind::SameSequence) {
      const auto &q1 = m_.sequence(p->first);
      const auto &q2 = m_.sequence(p->second);
      for (std::size_t i = 0; i < q1.size(); ++i) {
        const auto j = q2.position(q1.intervals[i]);
        if (!j)
          continue;
        post(guard(presences({q1.intervals[i]}),
                   flat::eq(flat::var(out_.sequences[p->first.index]->pos[i]),
                            flat::var(out_.sequences[p->second.index]->pos[*j]))));
      }
      return;
    }
    post_guarded(presences(r.guard), compile(*r.formula));
  }

  void lower_seq_no_overlap(const rec::SeqNoOverlap &r) {
    const auto &seq = m_.sequence(r.seq);
    const auto &xs = seq.intervals;
    const bool all_mandatory = std::none_of(xs.begin(), xs.end(), [&](IntervalId x) {
      return m_.interval(x).optional;
    });
    const bool positive_lengths = std::all_of(xs.begin(), xs.end(), [&](IntervalId x) {
      return out_.flat.vars[L(x).l].domain.lb() >= 1;
    });
    // Gaps enforced between every pair; direct transitions apply only to
    // consecutive members and are added below.
    const std::optional<Matrix> gaps = r.is_direct ? std::nullopt : r.transitions;

    const NoOverlapStrategy strategy = opts_.strategy;
    bool global = false;
    if (strategy == NoOverlapStrategy::UnaryCumulative) {
      if (r.transitions)
        throw Error(ErrorCode::StrategyUnsupported,
                    seq.id + ": unary cumulative cannot carry transition times");
      if (!positive_lengths)
        throw Error(ErrorCode::StrategyUnsupported,
                    seq.id + ": unary cumulative needs lengths >= 1");
    } else if (strategy == NoOverlapStrategy::Auto) {
      global = all_mandatory && !r.transitions && positive_lengths;
    }

    if (global) {
      flat::NoOverlap c;
      for (auto x : xs) {
        c.origins.push_back(L(x).s);
        c.lengths.push_back(operand_of(L(x).l));
      }
      out_.flat.post(std::move(c));
    } else if (strategy == NoOverlapStrategy::UnaryCumulative) {
      flat::Cumulative c;
      for (auto x : xs) {
        c.origins.push_back(L(x).s);
        c.lengths.push_back(operand_of(L(x).l));
        c.heights.push_back(L(x).p ? flat::Operand::of_var(*L(x).p)
                                   : flat::Operand::of_const(1));
      }
      c.cap = 1;
      out_.flat.post(std::move(c));
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
          const Value dij = gaps ? (*gaps)[seq.types[i]][seq.types[j]] : 0;
          const Value dji = gaps ? (*gaps)[seq.types[j]][seq.types[i]] : 0;
          post(guard(presences({xs[i], xs[j]}),
                     flat::make(Op::Or, {flat::le(flat::add(e_of(xs[i]), dij), s_of(xs[j])),
                                         flat::le(flat::add(e_of(xs[j]), dji), s_of(xs[i]))})));
        }
    }

    if (r.is_direct && r.transitions) {
      const auto &ls = *out_.sequences[r.seq.index];
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
          if (i == j)
            continue;
          const Value d = (*r.transitions)[seq.types[i]][seq.types[j]];
          post(flat::make(Op::Or, {flat::ne(flat::var(ls.nxt[i]), static_cast<Value>(j)),
                                   flat::le(flat::add(e_of(xs[i]), d), s_of(xs[j]))}));
        }
    }
  }

  Expr profile_at(const CumulExpr &cumul, const Expr &tau) const {
    std::vector<Expr> parts;
    for (const auto &t : cumul.terms()) {
      switch (t.kind) {
      case CumulTerm::Kind::Pulse:
        parts.push_back(flat::make(
            Op::Mul, {Expr(t.height), p_of(t.interval),
                      flat::make(Op::And, {flat::le(s_of(t.interval), tau),
                                           flat::gt(e_of(t.interval), tau)})}));
        break;
      case CumulTerm::Kind::StepAt:
        parts.push_back(flat::mul(t.height, flat::le(t.time, tau)));
        break;
      case CumulTerm::Kind::StepAtStart:
        parts.push_back(flat::make(Op::Mul, {Expr(t.height), p_of(t.interval),
                                             flat::le(s_of(t.interval), tau)}));
        break;
      case CumulTerm::Kind::StepAtEnd:
        parts.push_back(flat::make(Op::Mul, {Expr(t.height), p_of(t.interval),
                                             flat::le(e_of(t.interval), tau)}));
        break;
      }
    }
    return flat::make(Op::Add, std::move(parts));
  }

  void lower_cumul(const rec::CumulBound &r) {
    const bool all_time = std::holds_alternative<AllTime>(r.window);
    if (r.cumul.pulses_only() && all_time && r.lo <= 0 && r.hi >= 0) {
      flat::Cumulative c;
      for (const auto &t : r.cumul.terms()) {
        if (t.height == 0)
          continue;
        const auto &li = L(t.interval);
        c.origins.push_back(li.s);
        c.lengths.push_back(operand_of(li.l));
        if (!li.p) {
          c.heights.push_back(flat::Operand::of_const(t.height));
        } else if (t.height == 1) {
          c.heights.push_back(flat::Operand::of_var(*li.p));
        } else {
          const std::string base = m_.interval(t.interval).id + "_h";
          const VarIndex h = add_var(fresh(base), flat::Domain::of_values({0, t.height}));
          post(flat::eq(flat::var(h), flat::mul(flat::var(*li.p), t.height)));
          c.heights.push_back(flat::Operand::of_var(h));
        }
      }
      if (!c.origins.empty()) {
        c.cap = r.hi;
        out_.flat.post(std::move(c));
      }
      return;
    }

    Value wlo = out_.origin, whi = out_.horizon;
    std::set<Value> times;
    std::optional<IntervalId> window_iv;
    if (const auto *p = std::get_if<Period>(&r.window)) {
      wlo = std::max(wlo, p->first);
      whi = std::min(whi, p->second - 1);
    } else if (const auto *x = std::get_if<IntervalId>(&r.window)) {
      window_iv = *x;
      const auto &iv = m_.interval(*x);
      for (Value t = iv.start.lb; t <= iv.start.ub; ++t)
        times.insert(t);
    }
    times.insert(wlo);
    for (const auto &t : r.cumul.terms()) {
      if (t.kind == CumulTerm::Kind::StepAt) {
        times.insert(t.time);
        continue;
      }
      const auto &iv = m_.interval(t.interval);
      for (Value v = iv.start.lb; v <= iv.start.ub; ++v)
        times.insert(v);
      for (Value v = iv.end.lb; v <= iv.end.ub; ++v)
        times.insert(v);
    }
    const auto ps = window_iv ? presences({*window_iv}) : std::vector<Expr>{};
    for (Value tau : times) {
      if (tau < wlo || tau > whi)
        continue;
      const Expr f = profile_at(r.cumul, Expr(tau));
      Expr within = flat::make(Op::And, {flat::ge(f, r.lo), flat::le(f, r.hi)});
      if (window_iv)
        within = flat::make(Op::Or, {flat::gt(s_of(*window_iv), tau),
                                     flat::le(e_of(*window_iv), tau), within});
      post(guard(ps, within));
    }
  }

  void lower_objective(const Objective &obj) {
    const Expr e = compile(obj.expr);
    const VarIndex v = define("obj", e);
    out_.flat.objective = flat::Objective{
        obj.sense == Sense::Minimize ? flat::Sense::Minimize : flat::Sense::Maximize, v};
  }

  // --- expressions -------------------------------------------------------

  Expr compile(const ScalarExpr &e) {
    return std::visit([&](const auto &n) { return lower(n); }, e.node().v);
  }
  Expr compile(const BoolExpr &e) {
    return std::visit([&](const auto &n) { return lower(n); }, e.node().v);
  }

  Expr lower(const node::Const &n) { return Expr(n.value); }

  Expr lower(const node::Accessor &n) {
    const auto &li = L(n.interval);
    const Expr a = attr_of(n.interval, n.attr);
    if (n.raw || n.attr == Attr::Presence || !li.p)
      return a;
    const auto key = std::make_tuple(n.interval.index, static_cast<int>(n.attr), n.absent_value);
    if (auto it = folded_.find(key); it != folded_.end())
      return flat::var(it->second);
    const Expr p = flat::var(*li.p);
    const Expr value =
        flat::add(flat::mul(p, a), flat::mul(flat::sub(1, p), n.absent_value));
    const VarIndex v =
        define(m_.interval(n.interval).id + "_" + attr_suffix(n.attr) + "_opt", value);
    folded_[key] = v;
    return flat::var(v);
  }

  Expr lower(const node::SeqAccessor &n) {
    const auto &seq = m_.sequence(n.seq);
    const auto i = seq.position(n.interval);
    if (!i)
      throw Error(ErrorCode::NotInSequence, m_.interval(n.interval).id);
    const auto &ls = *out_.sequences[n.seq.index];
    const VarIndex idx = is_next(n.attr) ? ls.nxt[*i] : ls.prv[*i];
    const auto count = static_cast<Value>(seq.size());
    if (is_arg(n.attr)) {
      ElementArray arr{seq.types, n.boundary_value.value_or(seq.boundary_sentinel()),
                       n.absent_value.value_or(seq.absent_sentinel())};
      return element_of({arr.extended()}, false, {idx},
                        seq.id + "_" + m_.interval(n.interval).id +
                            (is_next(n.attr) ? "_next_type" : "_prev_type"));
    }
    const Attr a = neighbour_attr(n.attr);
    std::vector<Expr> parts;
    for (std::size_t j = 0; j < seq.size(); ++j)
      if (j != *i)
        parts.push_back(flat::mul(flat::eq(flat::var(idx), static_cast<Value>(j)),
                                  attr_of(seq.intervals[j], a)));
    parts.push_back(flat::mul(flat::eq(flat::var(idx), count), n.boundary_value.value_or(0)));
    parts.push_back(flat::mul(flat::eq(flat::var(idx), count + 1), n.absent_value.value_or(0)));
    return flat::make(Op::Add, std::move(parts));
  }

  Expr lower(const node::Arith &n) {
    std::vector<Expr> xs;
    for (const auto &a : n.args)
      xs.push_back(compile(a));
    switch (n.op) {
    case ArithOp::Add: return flat::make(Op::Add, std::move(xs));
    case ArithOp::Sub: return flat::make(Op::Sub, std::move(xs));
    case ArithOp::Mul: return flat::make(Op::Mul, std::move(xs));
    case ArithOp::Div:
      if (xs[1].is_const() && xs[1].value() == 0)
        throw Error(ErrorCode::DivisionByZero, "constant divisor 0");
      return flat::make(Op::Div, std::move(xs));
    case ArithOp::Abs: return flat::make(Op::Abs, std::move(xs));
    case ArithOp::Min: return flat::make(Op::Min, std::move(xs));
    case ArithOp::Max: return flat::make(Op::Max, std::move(xs));
    }
    return Expr(0);
  }

  Expr element_of(std::vector<std::vector<Value>> table, bool matrix,
                  std::vector<VarIndex> index, const std::string &base) {
    for (std::size_t k = 0; k < index.size(); ++k) {
      const auto &d = out_.flat.vars[index[k]].domain;
      const std::size_t extent = matrix && k == 0 ? table.size() : table.front().size();
      if (d.lb() < 0 || d.ub() >= static_cast<Value>(extent))
        throw Error(ErrorCode::IndexDomainExceedsTable,
                    out_.flat.vars[index[k]].name + " ranges outside the table");
    }
    std::vector<Value> values;
    for (const auto &row : table)
      values.insert(values.end(), row.begin(), row.end());
    const VarIndex v = add_var(fresh(base), flat::Domain::of_values(values));
    out_.flat.post(flat::Element{std::move(table), matrix, std::move(index), v});
    return flat::var(v);
  }

  VarIndex index_var(const ScalarExpr &e) { return define("idx", compile(e)); }

  Expr lower(const node::Element &n) {
    const VarIndex i = index_var(n.index[0]);
    return element_of({n.array->extended()}, false, {i}, "elt");
  }

  Expr lower(const node::Element2D &n) {
    const VarIndex r = index_var(n.index[0]);
    const VarIndex c = index_var(n.index[1]);
    return element_of(n.matrix->extended(), true, {r, c}, "elt");
  }

  Expr lower(const node::Aggregate &n) {
    std::vector<Expr> ps;
    bool all_mandatory = true;
    for (auto x : n.intervals) {
      ps.push_back(p_of(x));
      all_mandatory = all_mandatory && !L(x).p;
    }
    const Expr count = flat::make(Op::Add, ps);
    if (n.kind == AggKind::CountPresent)
      return count;
    auto extreme = [&](bool earliest) {
      std::vector<Expr> xs;
      const Value filler = earliest ? out_.horizon + 1 : out_.origin - 1;
      for (auto x : n.intervals) {
        const Expr v = earliest ? s_of(x) : e_of(x);
        if (!L(x).p)
          xs.push_back(v);
        else
          xs.push_back(flat::add(flat::mul(p_of(x), v), flat::mul(flat::sub(1, p_of(x)), filler)));
      }
      Expr agg = xs.size() == 1 ? xs[0] : flat::make(earliest ? Op::Min : Op::Max, xs);
      if (all_mandatory)
        return agg;
      return flat::mul(flat::gt(count, 0), agg);
    };
    switch (n.kind) {
    case AggKind::EarliestStart: return flat::var(define("earliest_start", extreme(true)));
    case AggKind::LatestEnd: return flat::var(define("latest_end", extreme(false)));
    case AggKind::Makespan: return flat::var(define("makespan", extreme(false)));
    case AggKind::SpanLength:
      return flat::var(define("span_length", flat::sub(extreme(false), extreme(true))));
    case AggKind::CountPresent: break;
    }
    return count;
  }

  Expr lower(const node::Height &n) {
    const Expr at = n.at_end ? e_of(n.interval) : s_of(n.interval);
    const Expr h = profile_at(*n.cumul, at);
    if (!L(n.interval).p)
      return h;
    const Expr p = p_of(n.interval);
    return flat::add(flat::mul(p, h), flat::mul(flat::sub(1, p), n.absent_value));
  }

  Expr lower(const node::IntVar &n) { return flat::var(out_.int_vars.at(n.var.index)); }

  Expr lower(const node::Cmp &n) {
    static constexpr Op ops[] = {Op::Lt, Op::Le, Op::Eq, Op::Ne, Op::Ge, Op::Gt};
    return flat::make(ops[static_cast<int>(n.op)], {compile(n.lhs), compile(n.rhs)});
  }

  Expr lower(const node::Logic &n) {
    std::vector<Expr> xs;
    for (const auto &a : n.args)
      xs.push_back(compile(a));
    switch (n.op) {
    case node::Logic::Op::And: return flat::make(Op::And, std::move(xs));
    case node::Logic::Op::Or: return flat::make(Op::Or, std::move(xs));
    case node::Logic::Op::Xor:
      if (xs.size() == 1)
        return xs[0];
      return flat::make(Op::Xor, std::move(xs));
    }
    return Expr(1);
  }

  Expr lower(const node::Not &n) { return flat::not_(compile(n.arg)); }
  Expr lower(const node::PresenceLit &n) { return lit(n.interval); }
  Expr lower(const node::BoolConst &n) { return Expr(n.value ? 1 : 0); }

  const Model &m_;
  const CompileOptions &opts_;
  CompiledModel out_;
  std::map<std::tuple<std::size_t, int, Value>, VarIndex> folded_;
};

} // namespace

CompiledModel compile_model(const Model &m, const CompileOptions &opts) {
  return Lowerer(m, opts).run();
}

Assignment decode(const CompiledModel &c, const std::vector<Value> &asn) {
  Assignment out;
  for (const auto &li : c.intervals) {
    IntervalValue v;
    v.present = !li.p || asn.at(*li.p) == 1;
    v.start = asn.at(li.s);
    v.end = asn.at(li.e);
    v.size = asn.at(li.sz);
    v.length = asn.at(li.l);
    out.intervals.push_back(v);
  }
  for (auto v : c.int_vars)
    out.int_vars.push_back(asn.at(v));
  return out;
}

Assignment decode_normalized(const CompiledModel &c, const std::vector<Value> &asn) {
  Assignment out = decode(c, asn);
  for (auto &v : out.intervals)
    if (!v.present)
      v = IntervalValue{false, 0, 0, 0, 0};
  return out;
}

} // namespace cpsched
