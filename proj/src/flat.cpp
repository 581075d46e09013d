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

#include "cpsched/flat.hpp"

#include "cpsched/error.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace cpsched::flat {

// --- Domain -----------------------------------------------------------------

Domain::Domain(IntDomain range) {
  if (!range.empty())
    ranges_.push_back(range);
}

Domain Domain::of_values(std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Domain d;
  for (Value v : values) {
    if (!d.ranges_.empty() && d.ranges_.back().ub + 1 == v)
      d.ranges_.back().ub = v;
    else
      d.ranges_.push_back({v, v});
  }
  return d;
}

Value Domain::size() const {
  Value n = 0;
  for (const auto &r : ranges_)
    n += r.size();
  return n;
}

bool Domain::contains(Value v) const {
  auto it = std::lower_bound(ranges_.begin(), ranges_.end(), v,
                             [](const IntDomain &r, Value x) { return r.ub < x; });
  return it != ranges_.end() && it->lb <= v;
}

std::vector<Value> Domain::values() const {
  std::vector<Value> out;
  for (const auto &r : ranges_)
    for (Value v = r.lb; v <= r.ub; ++v)
      out.push_back(v);
  return out;
}

Domain Domain::intersect(IntDomain range) const {
  Domain d;
  for (const auto &r : ranges_) {
    const auto x = r.intersect(range);
    if (!x.empty())
      d.ranges_.push_back(x);
  }
  return d;
}

// --- Expressions --------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 19> kOpNames = {
    "", "", "eq", "ne", "lt", "le", "gt", "ge", "add", "sub",
    "mul", "div", "abs", "min", "max", "and", "or", "xor", "not"};

constexpr Value kBig = Value{1} << 50;

Value clamp(__int128 v) {
  if (v > kBig)
    return kBig;
  if (v < -kBig)
    return -kBig;
  return static_cast<Value>(v);
}

std::shared_ptr<const ExprNode> leaf(Op op, Value value, VarIndex v) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->var = v;
  return n;
}

Value apply_op(Op op, const std::vector<Value> &xs) {
  switch (op) {
  case Op::Eq: return xs[0] == xs[1];
  case Op::Ne: return xs[0] != xs[1];
  case Op::Lt: return xs[0] < xs[1];
  case Op::Le: return xs[0] <= xs[1];
  case Op::Gt: return xs[0] > xs[1];
  case Op::Ge: return xs[0] >= xs[1];
  case Op::Add: {
    Value s = 0;
    for (Value x : xs)
      s += x;
    return s;
  }
  case Op::Sub: return xs[0] - xs[1];
  case Op::Mul: {
    Value p = 1;
    for (Value x : xs)
      p *= x;
    return p;
  }
  case Op::Div:
    if (xs[1] == 0)
      throw ZeroDivisor{};
    return xs[0] / xs[1];
  case Op::Abs: return xs[0] < 0 ? -xs[0] : xs[0];
  case Op::Min: return *std::min_element(xs.begin(), xs.end());
  case Op::Max: return *std::max_element(xs.begin(), xs.end());
  case Op::And:
    return std::all_of(xs.begin(), xs.end(), [](Value x) { return x != 0; });
  case Op::Or:
    return std::any_of(xs.begin(), xs.end(), [](Value x) { return x != 0; });
  case Op::Xor: {
    bool parity = false;
    for (Value x : xs)
      parity ^= x != 0;
    return parity;
  }
  case Op::Not: return xs[0] == 0;
  case Op::Const:
  case Op::Var: break;
  }
  return 0;
}

} // namespace

std::string_view op_name(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
  for (std::size_t i = 2; i < kOpNames.size(); ++i)
    if (kOpNames[i] == name)
      return static_cast<Op>(i);
  return std::nullopt;
}

bool is_boolean(Op op) {
  switch (op) {
  case Op::Eq:
  case Op::Ne:
  case Op::Lt:
  case Op::Le:
  case Op::Gt:
  case Op::Ge:
  case Op::And:
  case Op::Or:
  case Op::Xor:
  case Op::Not: return true;
  default: return false;
  }
}

Expr::Expr(Value constant) : node_(leaf(Op::Const, constant, 0)) {}
Op Expr::op() const { return node_->op; }
Value Expr::value() const { return node_->value; }
VarIndex Expr::var() const { return node_->var; }
const std::vector<Expr> &Expr::args() const { return node_->args; }

Expr var(VarIndex v) { return Expr(leaf(Op::Var, 0, v)); }

Expr make(Op op, std::vector<Expr> args) {
  if (op == Op::And || op == Op::Or) {
    const Value neutral = op == Op::And ? 1 : 0;
    std::vector<Expr> kept;
    for (auto &a : args) {
      if (a.is_const()) {
        if ((a.value() != 0) != (neutral != 0))
          return Expr(1 - neutral);
        continue;
      }
      kept.push_back(std::move(a));
    }
    if (kept.empty())
      return Expr(neutral);
    if (kept.size() == 1 && is_boolean(kept[0].op()))
      return kept[0];
    args = std::move(kept);
  } else if (op == Op::Add) {
    std::vector<Expr> kept;
    Value c = 0;
    for (auto &a : args) {
      if (a.is_const())
        c += a.value();
      else
        kept.push_back(std::move(a));
    }
    if (c != 0 || kept.empty())
      kept.emplace_back(c);
    if (kept.size() == 1)
      return kept[0];
    args = std::move(kept);
  } else if (op == Op::Mul) {
    std::vector<Expr> kept;
    Value c = 1;
    for (auto &a : args) {
      if (a.is_const())
        c *= a.value();
      else
        kept.push_back(std::move(a));
    }
    if (c == 0)
      return Expr(0);
    if (c != 1 || kept.empty())
      kept.emplace_back(c);
    if (kept.size() == 1)
      return kept[0];
    args = std::move(kept);
  } else if (op == Op::Sub && args[1].is_const() && args[1].value() == 0) {
    return args[0];
  } else if (op == Op::Not && args[0].op() == Op::Not) {
    return args[0].args()[0];
  }
  if (std::all_of(args.begin(), args.end(), [](const Expr &a) { return a.is_const(); })) {
    std::vector<Value> xs;
    for (const auto &a : args)
      xs.push_back(a.value());
    try {
      return Expr(apply_op(op, xs));
    } catch (const ZeroDivisor &) {
    }
  }
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Value evaluate(const Expr &e, const std::vector<Value> &asn) {
  switch (e.op()) {
  case Op::Const: return e.value();
  case Op::Var: return asn[e.var()];
  default: break;
  }
  std::vector<Value> xs;
  xs.reserve(e.args().size());
  for (const auto &a : e.args())
    xs.push_back(evaluate(a, asn));
  return apply_op(e.op(), xs);
}

IntDomain bounds(const Expr &e, const std::vector<IntDomain> &vb) {
  switch (e.op()) {
  case Op::Const: return e.value();
  case Op::Var: return vb[e.var()];
  default: break;
  }
  std::vector<IntDomain> xs;
  xs.reserve(e.args().size());
  for (const auto &a : e.args())
    xs.push_back(bounds(a, vb));
  const IntDomain unknown{0, 1};
  auto truth = [](bool always, bool never) -> IntDomain {
    if (always)
      return 1;
    if (never)
      return 0;
    return {0, 1};
  };
  const auto &a = xs[0];
  switch (e.op()) {
  case Op::Eq:
    return truth(a.fixed() && xs[1].fixed() && a.lb == xs[1].lb,
                 a.ub < xs[1].lb || xs[1].ub < a.lb);
  case Op::Ne:
    return truth(a.ub < xs[1].lb || xs[1].ub < a.lb,
                 a.fixed() && xs[1].fixed() && a.lb == xs[1].lb);
  case Op::Lt: return truth(a.ub < xs[1].lb, a.lb >= xs[1].ub);
  case Op::Le: return truth(a.ub <= xs[1].lb, a.lb > xs[1].ub);
  case Op::Gt: return truth(a.lb > xs[1].ub, a.ub <= xs[1].lb);
  case Op::Ge: return truth(a.lb >= xs[1].ub, a.ub < xs[1].lb);
  case Op::Add: {
    __int128 lo = 0, hi = 0;
    for (const auto &x : xs) {
      lo += x.lb;
      hi += x.ub;
    }
    return {clamp(lo), clamp(hi)};
  }
  case Op::Sub:
    return {clamp(static_cast<__int128>(a.lb) - xs[1].ub),
            clamp(static_cast<__int128>(a.ub) - xs[1].lb)};
  case Op::Mul: {
    IntDomain acc = 1;
    for (const auto &x : xs) {
      const std::array<__int128, 4> c = {
          static_cast<__int128>(acc.lb) * x.lb, static_cast<__int128>(acc.lb) * x.ub,
          static_cast<__int128>(acc.ub) * x.lb, static_cast<__int128>(acc.ub) * x.ub};
      acc = {clamp(*std::min_element(c.begin(), c.end())),
             clamp(*std::max_element(c.begin(), c.end()))};
    }
    return acc;
  }
  case Op::Div: {
    const auto &b = xs[1];
    if (b.contains(0) && b.fixed())
      return {0, 0}; // never satisfied; any range is sound
    // Truncating division: |a / b| <= |a|, and the extremes occur at the
    // divisor values closest to zero or at the divisor bounds.
    std::vector<Value> ds = {b.lb, b.ub};
    if (b.contains(1))
      ds.push_back(1);
    if (b.contains(-1))
      ds.push_back(-1);
    Value lo = kBig, hi = -kBig;
    for (Value d : ds) {
      if (d == 0)
        continue;
      for (Value n : {a.lb, a.ub}) {
        lo = std::min(lo, n / d);
        hi = std::max(hi, n / d);
      }
    }
    if (a.contains(0)) {
      lo = std::min<Value>(lo, 0);
      hi = std::max<Value>(hi, 0);
    }
    return {lo, hi};
  }
  case Op::Abs:
    if (a.lb >= 0)
      return a;
    if (a.ub <= 0)
      return {-a.ub, -a.lb};
    return {0, std::max(-a.lb, a.ub)};
  case Op::Min: {
    IntDomain r = a;
    for (const auto &x : xs) {
      r.lb = std::min(r.lb, x.lb);
      r.ub = std::min(r.ub, x.ub);
    }
    return r;
  }
  case Op::Max: {
    IntDomain r = a;
    for (const auto &x : xs) {
      r.lb = std::max(r.lb, x.lb);
      r.ub = std::max(r.ub, x.ub);
    }
    return r;
  }
  case Op::And: {
    bool all = true, none = false;
    for (const auto &x : xs) {
      all = all && !x.contains(0);
      none = none || (x.fixed() && x.lb == 0);
    }
    return truth(all, none);
  }
  case Op::Or: {
    bool any = false, none = true;
    for (const auto &x : xs) {
      any = any || !x.contains(0);
      none = none && x.fixed() && x.lb == 0;
    }
    return truth(any, none);
  }
  case Op::Xor: {
    bool parity = false;
    for (const auto &x : xs) {
      if (x.contains(0) && !(x.fixed()))
        return unknown;
      parity ^= x.lb != 0;
    }
    return parity ? 1 : 0;
  }
  case Op::Not: return truth(a.fixed() && a.lb == 0, !a.contains(0));
  default: break;
  }
  return unknown;
}

namespace {
void gather(const Expr &e, std::vector<VarIndex> &out) {
  if (e.is_var()) {
    if (std::find(out.begin(), out.end(), e.var()) == out.end())
      out.push_back(e.var());
    return;
  }
  for (const auto &a : e.args())
    gather(a, out);
}
} // namespace

std::vector<VarIndex> variables(const Expr &e) {
  std::vector<VarIndex> out;
  gather(e, out);
  return out;
}

// --- Constraints --------------------------------------------------------------

std::vector<VarIndex> scope(const Constraint &c) {
  std::vector<VarIndex> out;
  auto add = [&](VarIndex v) {
    if (std::find(out.begin(), out.end(), v) == out.end())
      out.push_back(v);
  };
  auto add_op = [&](const Operand &o) {
    if (o.var)
      add(*o.var);
  };
  std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Intension>) {
          out = variables(x.expr);
        } else if constexpr (std::is_same_v<T, Extension>) {
          for (auto v : x.vars)
            add(v);
        } else if constexpr (std::is_same_v<T, NoOverlap>) {
          for (auto v : x.origins)
            add(v);
          for (const auto &o : x.lengths)
            add_op(o);
        } else if constexpr (std::is_same_v<T, Cumulative>) {
          for (auto v : x.origins)
            add(v);
          for (const auto &o : x.lengths)
            add_op(o);
          for (const auto &o : x.heights)
            add_op(o);
        } else {
          for (auto v : x.index)
            add(v);
          add(x.value);
        }
      },
      c);
  return out;
}

VarIndex Model::add_var(std::string name, Domain domain, bool is_bool) {
  if (domain.empty())
    throw Error(ErrorCode::EmptyDomain, name + ": empty flat domain");
  if (find(name))
    throw Error(ErrorCode::DuplicateId, name);
  vars.push_back({std::move(name), std::move(domain), is_bool});
  return vars.size() - 1;
}

std::optional<VarIndex> Model::find(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name)
      return i;
  return std::nullopt;
}

bool holds(const Constraint &c, const std::vector<Value> &asn) {
  if (const auto *x = std::get_if<Intension>(&c)) {
    try {
      return evaluate(x->expr, asn) != 0;
    } catch (const ZeroDivisor &) {
      return false;
    }
  }
  if (const auto *x = std::get_if<Extension>(&c)) {
    std::vector<Value> t;
    for (auto v : x->vars)
      t.push_back(asn[v]);
    const bool found = std::find(x->tuples.begin(), x->tuples.end(), t) != x->tuples.end();
    return found == x->positive;
  }
  if (const auto *x = std::get_if<NoOverlap>(&c)) {
    for (std::size_t i = 0; i < x->origins.size(); ++i)
      for (std::size_t j = i + 1; j < x->origins.size(); ++j) {
        const Value si = asn[x->origins[i]], sj = asn[x->origins[j]];
        const Value ei = si + x->lengths[i].eval(asn);
        const Value ej = sj + x->lengths[j].eval(asn);
        if (!(ei <= sj || ej <= si))
          return false;
      }
    return true;
  }
  if (const auto *x = std::get_if<Cumulative>(&c)) {
    // The load only increases at task origins, so checking them suffices.
    for (auto at : x->origins) {
      const Value t = asn[at];
      Value load = 0;
      for (std::size_t j = 0; j < x->origins.size(); ++j) {
        const Value s = asn[x->origins[j]];
        if (s <= t && t < s + x->lengths[j].eval(asn))
          load += x->heights[j].eval(asn);
      }
      if (load > x->cap)
        return false;
    }
    return true;
  }
  const auto &el = std::get<Element>(c);
  const Value r = el.matrix ? asn[el.index[0]] : 0;
  const Value col = asn[el.index[el.matrix ? 1 : 0]];
  if (r < 0 || static_cast<std::size_t>(r) >= el.table.size())
    return false;
  const auto &row = el.table[static_cast<std::size_t>(r)];
  if (col < 0 || static_cast<std::size_t>(col) >= row.size())
    return false;
  return row[static_cast<std::size_t>(col)] == asn[el.value];
}

bool check(const Model &m, const std::vector<Value> &asn) {
  if (asn.size() != m.vars.size())
    throw Error(ErrorCode::PartialAssignment,
                "assignment has " + std::to_string(asn.size()) + " values for " +
                    std::to_string(m.vars.size()) + " variables");
  for (std::size_t i = 0; i < asn.size(); ++i)
    if (!m.vars[i].domain.contains(asn[i]))
      return false;
  return std::all_of(m.constraints.begin(), m.constraints.end(),
                     [&](const Constraint &c) { return holds(c, asn); });
}

std::string_view to_string(Status s) {
  switch (s) {
  case Status::Optimum: return "OPTIMUM";
  case Status::Sat: return "SAT";
  case Status::Unsat: return "UNSAT";
  case Status::Timeout: return "TIMEOUT";
  }
  return "";
}

} // namespace cpsched::flat
