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

#include "cpsched/expr.hpp"

#include "cpsched/error.hpp"

#include <algorithm>

namespace cpsched {

namespace {

ScalarExpr make(auto n) {
  return ScalarExpr(std::make_shared<const ScalarNode>(ScalarNode{std::move(n)}));
}

BoolExpr make_bool(auto n) {
  return BoolExpr(std::make_shared<const BoolNode>(BoolNode{std::move(n)}));
}

} // namespace

bool is_next(SeqAttr a) {
  switch (a) {
  case SeqAttr::NextArg:
  case SeqAttr::StartOfNext:
  case SeqAttr::EndOfNext:
  case SeqAttr::SizeOfNext:
  case SeqAttr::LengthOfNext:
    return true;
  default:
    return false;
  }
}

bool is_arg(SeqAttr a) { return a == SeqAttr::NextArg || a == SeqAttr::PrevArg; }

Attr neighbour_attr(SeqAttr a) {
  switch (a) {
  case SeqAttr::StartOfNext:
  case SeqAttr::StartOfPrev:
    return Attr::Start;
  case SeqAttr::EndOfNext:
  case SeqAttr::EndOfPrev:
    return Attr::End;
  case SeqAttr::SizeOfNext:
  case SeqAttr::SizeOfPrev:
    return Attr::Size;
  case SeqAttr::LengthOfNext:
  case SeqAttr::LengthOfPrev:
    return Attr::Length;
  default:
    return Attr::Presence;
  }
}

// --- element tables ---------------------------------------------------------

std::size_t ElementArray::extended_size() const {
  if (absent_value)
    return data.size() + 2;
  if (boundary_value)
    return data.size() + 1;
  return data.size();
}

std::optional<Value> ElementArray::lookup(Value index) const {
  const auto n = static_cast<Value>(data.size());
  if (index >= 0 && index < n)
    return data[static_cast<std::size_t>(index)];
  if (index == n && boundary_value)
    return boundary_value;
  if (index == n + 1 && absent_value)
    return absent_value;
  return std::nullopt;
}

std::vector<Value> ElementArray::extended() const {
  std::vector<Value> out;
  for (std::size_t i = 0; i < extended_size(); ++i)
    out.push_back(lookup(static_cast<Value>(i)).value_or(0));
  return out;
}

std::size_t ElementMatrix::extended_rows() const {
  return rows() + (absent_value ? 2 : boundary_value ? 1 : 0);
}

std::size_t ElementMatrix::extended_cols() const {
  return cols() + (absent_value ? 2 : boundary_value ? 1 : 0);
}

std::optional<Value> ElementMatrix::lookup(Value row, Value col) const {
  const auto r = static_cast<Value>(rows());
  const auto c = static_cast<Value>(cols());
  if (row < 0 || col < 0 || row >= static_cast<Value>(extended_rows()) ||
      col >= static_cast<Value>(extended_cols()))
    return std::nullopt;
  if (row == r + 1 || col == c + 1)
    return absent_value;
  if (row == r || col == c)
    return boundary_value;
  return data[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
}

std::vector<std::vector<Value>> ElementMatrix::extended() const {
  std::vector<std::vector<Value>> out(extended_rows());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < extended_cols(); ++j)
      out[i].push_back(
          lookup(static_cast<Value>(i), static_cast<Value>(j)).value_or(0));
  return out;
}

void validate(const ElementMatrix &m) {
  for (const auto &row : m.data)
    if (row.size() != m.cols())
      throw Error(ErrorCode::BadArgument, "matrix rows differ in length");
}

// --- cumul functions ----------------------------------------------------------

CumulExpr::CumulExpr(std::vector<CumulTerm> terms) : terms_(std::move(terms)) {
  for (const auto &t : terms_)
    if (t.kind == CumulTerm::Kind::Pulse && t.height < 0)
      throw Error(ErrorCode::BadArgument, "pulse height must be >= 0");
}

bool CumulExpr::pulses_only() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const CumulTerm &t) {
    return t.kind == CumulTerm::Kind::Pulse;
  });
}

Value CumulExpr::min_possible() const {
  Value v = 0;
  for (const auto &t : terms_)
    if (t.height < 0)
      v += t.height;
  return v;
}

CumulExpr &CumulExpr::operator+=(const CumulExpr &other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

CumulExpr pulse(IntervalId interval, Value height) {
  return CumulExpr({CumulTerm{CumulTerm::Kind::Pulse, interval, 0, height}});
}
CumulExpr step_at(Value time, Value height) {
  return CumulExpr({CumulTerm{CumulTerm::Kind::StepAt, {}, time, height}});
}
CumulExpr step_at_start(IntervalId interval, Value height) {
  return CumulExpr({CumulTerm{CumulTerm::Kind::StepAtStart, interval, 0, height}});
}
CumulExpr step_at_end(IntervalId interval, Value height) {
  return CumulExpr({CumulTerm{CumulTerm::Kind::StepAtEnd, interval, 0, height}});
}

// --- scalar expressions -------------------------------------------------------

ScalarExpr::ScalarExpr(Value constant)
    : node_(std::make_shared<const ScalarNode>(ScalarNode{node::Const{constant}})) {}

BoolExpr::BoolExpr(bool constant)
    : node_(std::make_shared<const BoolNode>(BoolNode{node::BoolConst{constant}})) {}

ScalarExpr accessor(Attr attr, IntervalId x, Value absent_value) {
  return make(node::Accessor{attr, x, attr == Attr::Presence ? 0 : absent_value, false});
}
ScalarExpr start_of(IntervalId x, Value absent_value) {
  return accessor(Attr::Start, x, absent_value);
}
ScalarExpr end_of(IntervalId x, Value absent_value) {
  return accessor(Attr::End, x, absent_value);
}
ScalarExpr size_of(IntervalId x, Value absent_value) {
  return accessor(Attr::Size, x, absent_value);
}
ScalarExpr length_of(IntervalId x, Value absent_value) {
  return accessor(Attr::Length, x, absent_value);
}
ScalarExpr presence_of(IntervalId x) { return accessor(Attr::Presence, x, 0); }

ScalarExpr raw_attr(Attr attr, IntervalId x) {
  return make(node::Accessor{attr, x, 0, true});
}

ScalarExpr int_var(IntVarId v) { return make(node::IntVar{v}); }

ScalarExpr seq_expr(SeqAttr attr, SequenceId seq, IntervalId x,
                    std::optional<Value> boundary_value,
                    std::optional<Value> absent_value) {
  return make(node::SeqAccessor{attr, seq, x, boundary_value, absent_value});
}

ScalarExpr arith(ArithOp op, std::vector<ScalarExpr> args) {
  const bool unary = op == ArithOp::Abs;
  const bool binary = op == ArithOp::Sub || op == ArithOp::Div;
  if ((unary && args.size() != 1) || (binary && args.size() != 2) || args.empty())
    throw Error(ErrorCode::BadArgument, "wrong operand count");
  if (op == ArithOp::Div) {
    if (const auto *c = std::get_if<node::Const>(&args[1].node().v);
        c && c->value == 0)
      throw Error(ErrorCode::DivisionByZero, "constant divisor 0");
  }
  return make(node::Arith{op, std::move(args)});
}

ScalarExpr abs_of(ScalarExpr e) { return arith(ArithOp::Abs, {std::move(e)}); }
ScalarExpr expr_min(std::vector<ScalarExpr> args) {
  return arith(ArithOp::Min, std::move(args));
}
ScalarExpr expr_max(std::vector<ScalarExpr> args) {
  return arith(ArithOp::Max, std::move(args));
}
ScalarExpr sum_of(std::vector<ScalarExpr> args) {
  if (args.empty())
    return ScalarExpr(Value{0});
  return arith(ArithOp::Add, std::move(args));
}

ScalarExpr overlap_length(IntervalId a, IntervalId b) {
  return expr_max({Value{0}, expr_min({end_of(a), end_of(b)}) -
                                 expr_max({start_of(a), start_of(b)})});
}

ScalarExpr element(ElementArray array, ScalarExpr index) {
  return make(node::Element{std::make_shared<const ElementArray>(std::move(array)),
                            {std::move(index)}});
}

ScalarExpr element2d(ElementMatrix matrix, ScalarExpr row, ScalarExpr col) {
  validate(matrix);
  return make(node::Element2D{std::make_shared<const ElementMatrix>(std::move(matrix)),
                              {std::move(row), std::move(col)}});
}

ScalarExpr aggregate(AggKind kind, std::vector<IntervalId> intervals) {
  if (intervals.empty())
    throw Error(ErrorCode::EmptyChildren, "aggregate over no intervals");
  return make(node::Aggregate{kind, std::move(intervals)});
}

ScalarExpr height_at_start(IntervalId x, const CumulExpr &cumul, Value absent_value) {
  return make(node::Height{false, x, std::make_shared<const CumulExpr>(cumul), absent_value});
}

ScalarExpr height_at_end(IntervalId x, const CumulExpr &cumul, Value absent_value) {
  return make(node::Height{true, x, std::make_shared<const CumulExpr>(cumul), absent_value});
}

ScalarExpr operator+(const ScalarExpr &a, const ScalarExpr &b) {
  return arith(ArithOp::Add, {a, b});
}
ScalarExpr operator-(const ScalarExpr &a, const ScalarExpr &b) {
  return arith(ArithOp::Sub, {a, b});
}
ScalarExpr operator*(const ScalarExpr &a, const ScalarExpr &b) {
  return arith(ArithOp::Mul, {a, b});
}
ScalarExpr operator/(const ScalarExpr &a, const ScalarExpr &b) {
  return arith(ArithOp::Div, {a, b});
}

// --- boolean expressions ------------------------------------------------------

BoolExpr compare(CmpOp op, const ScalarExpr &a, const ScalarExpr &b) {
  return make_bool(node::Cmp{op, a, b});
}
BoolExpr operator<(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Lt, a, b); }
BoolExpr operator<=(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Le, a, b); }
BoolExpr operator==(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Eq, a, b); }
BoolExpr operator!=(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Ne, a, b); }
BoolExpr operator>=(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Ge, a, b); }
BoolExpr operator>(const ScalarExpr &a, const ScalarExpr &b) { return compare(CmpOp::Gt, a, b); }

BoolExpr all_of(std::vector<BoolExpr> args) {
  if (args.empty())
    return BoolExpr(true);
  if (args.size() == 1)
    return args.front();
  return make_bool(node::Logic{node::Logic::Op::And, std::move(args)});
}

BoolExpr any_of(std::vector<BoolExpr> args) {
  if (args.empty())
    return BoolExpr(false);
  if (args.size() == 1)
    return args.front();
  return make_bool(node::Logic{node::Logic::Op::Or, std::move(args)});
}

BoolExpr xor_of(std::vector<BoolExpr> args) {
  if (args.empty())
    return BoolExpr(false);
  return make_bool(node::Logic{node::Logic::Op::Xor, std::move(args)});
}

BoolExpr operator&&(const BoolExpr &a, const BoolExpr &b) { return all_of({a, b}); }
BoolExpr operator||(const BoolExpr &a, const BoolExpr &b) { return any_of({a, b}); }
BoolExpr operator!(const BoolExpr &a) { return make_bool(node::Not{a}); }
BoolExpr implies(const BoolExpr &a, const BoolExpr &b) { return !a || b; }
BoolExpr presence_lit(IntervalId x) { return make_bool(node::PresenceLit{x}); }

// --- reference collection -----------------------------------------------------

namespace {

void collect_cumul(const CumulExpr &c, References &out) {
  for (const auto &t : c.terms())
    if (t.kind != CumulTerm::Kind::StepAt)
      out.intervals.push_back(t.interval);
}

} // namespace

void collect(const ScalarExpr &e, References &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Accessor>) {
          out.intervals.push_back(n.interval);
        } else if constexpr (std::is_same_v<N, node::SeqAccessor>) {
          out.sequences.push_back(n.seq);
          out.intervals.push_back(n.interval);
        } else if constexpr (std::is_same_v<N, node::Arith>) {
          for (const auto &a : n.args)
            collect(a, out);
        } else if constexpr (std::is_same_v<N, node::Element> ||
                             std::is_same_v<N, node::Element2D>) {
          for (const auto &a : n.index)
            collect(a, out);
        } else if constexpr (std::is_same_v<N, node::Aggregate>) {
          out.intervals.insert(out.intervals.end(), n.intervals.begin(),
                               n.intervals.end());
        } else if constexpr (std::is_same_v<N, node::Height>) {
          out.intervals.push_back(n.interval);
          collect_cumul(*n.cumul, out);
        } else if constexpr (std::is_same_v<N, node::IntVar>) {
          out.int_vars.push_back(n.var);
        }
      },
      e.node().v);
}

void collect(const BoolExpr &e, References &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Cmp>) {
          collect(n.lhs, out);
          collect(n.rhs, out);
        } else if constexpr (std::is_same_v<N, node::Logic>) {
          for (const auto &a : n.args)
            collect(a, out);
        } else if constexpr (std::is_same_v<N, node::Not>) {
          collect(n.arg, out);
        } else if constexpr (std::is_same_v<N, node::PresenceLit>) {
          out.intervals.push_back(n.interval);
        }
      },
      e.node().v);
}

} // namespace cpsched
