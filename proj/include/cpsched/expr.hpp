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

#ifndef CPSCHED_EXPR_HPP
#define CPSCHED_EXPR_HPP

#include "cpsched/types.hpp"

#include <initializer_list>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace cpsched {

enum class Attr { Start, End, Size, Length, Presence };

enum class SeqAttr {
  NextArg,
  StartOfNext,
  EndOfNext,
  SizeOfNext,
  LengthOfNext,
  PrevArg,
  StartOfPrev,
  EndOfPrev,
  SizeOfPrev,
  LengthOfPrev,
};

enum class ArithOp { Add, Sub, Mul, Div, Abs, Min, Max };
enum class AggKind { CountPresent, EarliestStart, LatestEnd, SpanLength, Makespan };
enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

[[nodiscard]] bool is_next(SeqAttr a);
[[nodiscard]] bool is_arg(SeqAttr a);
/// The interval attribute a SeqAccessor reads from the neighbour (Presence
/// is used as a placeholder for next_arg/prev_arg which return its type).
[[nodiscard]] Attr neighbour_attr(SeqAttr a);

/// 1-D constant table with optional sentinel extension: index size() maps to
/// boundary_value and size() + 1 to absent_value when those are set.
struct ElementArray {
  std::vector<Value> data;
  std::optional<Value> boundary_value;
  std::optional<Value> absent_value;

  [[nodiscard]] std::size_t extended_size() const;
  [[nodiscard]] std::optional<Value> lookup(Value index) const;
  [[nodiscard]] std::vector<Value> extended() const;
};

/// 2-D rectangular table. Sentinels extend both rows and columns; an absent
/// sentinel on either index wins over a boundary sentinel.
struct ElementMatrix {
  std::vector<std::vector<Value>> data;
  std::optional<Value> boundary_value;
  std::optional<Value> absent_value;

  [[nodiscard]] std::size_t rows() const { return data.size(); }
  [[nodiscard]] std::size_t cols() const {
    return data.empty() ? 0 : data.front().size();
  }
  [[nodiscard]] std::size_t extended_rows() const;
  [[nodiscard]] std::size_t extended_cols() const;
  [[nodiscard]] std::optional<Value> lookup(Value row, Value col) const;
  [[nodiscard]] std::vector<std::vector<Value>> extended() const;
};

void validate(const ElementMatrix &m);

// Resource usage profile: sum of pulses and permanent steps.
struct CumulTerm {
  enum class Kind { Pulse, StepAt, StepAtStart, StepAtEnd };
  Kind kind = Kind::Pulse;
  IntervalId interval{};
  Value time = 0; // StepAt only
  Value height = 0;
};

class CumulExpr {
public:
  CumulExpr() = default;
  explicit CumulExpr(std::vector<CumulTerm> terms);

  [[nodiscard]] const std::vector<CumulTerm> &terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] bool pulses_only() const;
  /// Lowest value the profile can ever reach (sum of negative steps).
  [[nodiscard]] Value min_possible() const;

  CumulExpr &operator+=(const CumulExpr &other);
  friend CumulExpr operator+(CumulExpr lhs, const CumulExpr &rhs) {
    lhs += rhs;
    return lhs;
  }

private:
  std::vector<CumulTerm> terms_;
};

CumulExpr pulse(IntervalId interval, Value height);
CumulExpr step_at(Value time, Value height);
CumulExpr step_at_start(IntervalId interval, Value height);
CumulExpr step_at_end(IntervalId interval, Value height);

struct ScalarNode;
struct BoolNode;

class ScalarExpr {
public:
  ScalarExpr(Value constant); // NOLINT(google-explicit-constructor)
  explicit ScalarExpr(std::shared_ptr<const ScalarNode> node)
      : node_(std::move(node)) {}

  [[nodiscard]] const ScalarNode &node() const { return *node_; }

private:
  std::shared_ptr<const ScalarNode> node_;
};

class BoolExpr {
public:
  BoolExpr(bool constant); // NOLINT(google-explicit-constructor)
  explicit BoolExpr(std::shared_ptr<const BoolNode> node)
      : node_(std::move(node)) {}

  [[nodiscard]] const BoolNode &node() const { return *node_; }

private:
  std::shared_ptr<const BoolNode> node_;
};

namespace node {

struct Const {
  Value value = 0;
};
/// Interval attribute. When raw is set the absent_value is ignored and the
/// attribute is read even for absent intervals; constraint formulas use
/// raw accessors under an explicit presence guard.
struct Accessor {
  Attr attr = Attr::Start;
  IntervalId interval{};
  Value absent_value = 0;
  bool raw = false;
};
struct SeqAccessor {
  SeqAttr attr = SeqAttr::NextArg;
  SequenceId seq{};
  IntervalId interval{};
  std::optional<Value> boundary_value;
  std::optional<Value> absent_value;
};
struct Arith {
  ArithOp op = ArithOp::Add;
  std::vector<ScalarExpr> args;
};
struct Element {
  std::shared_ptr<const ElementArray> array;
  std::vector<ScalarExpr> index; // exactly one
};
struct Element2D {
  std::shared_ptr<const ElementMatrix> matrix;
  std::vector<ScalarExpr> index; // row, col
};
struct Aggregate {
  AggKind kind = AggKind::CountPresent;
  std::vector<IntervalId> intervals;
};
struct Height {
  bool at_end = false;
  IntervalId interval{};
  std::shared_ptr<const CumulExpr> cumul;
  Value absent_value = 0;
};
struct IntVar {
  IntVarId var{};
};

struct Cmp {
  CmpOp op = CmpOp::Eq;
  ScalarExpr lhs;
  ScalarExpr rhs;
};
struct Logic {
  enum class Op { And, Or, Xor } op = Op::And;
  std::vector<BoolExpr> args;
};
struct Not {
  BoolExpr arg;
};
struct PresenceLit {
  IntervalId interval{};
};
struct BoolConst {
  bool value = true;
};

} // namespace node

struct ScalarNode {
  std::variant<node::Const, node::Accessor, node::SeqAccessor, node::Arith,
               node::Element, node::Element2D, node::Aggregate, node::Height,
               node::IntVar>
      v;
};

struct BoolNode {
  std::variant<node::Cmp, node::Logic, node::Not, node::PresenceLit,
               node::BoolConst>
      v;
};

// Interval accessors. absent_value is returned for an absent interval.
ScalarExpr start_of(IntervalId x, Value absent_value = 0);
ScalarExpr end_of(IntervalId x, Value absent_value = 0);
ScalarExpr size_of(IntervalId x, Value absent_value = 0);
ScalarExpr length_of(IntervalId x, Value absent_value = 0);
ScalarExpr presence_of(IntervalId x);
ScalarExpr accessor(Attr attr, IntervalId x, Value absent_value = 0);
/// Attribute value regardless of presence (for guarded formulas).
ScalarExpr raw_attr(Attr attr, IntervalId x);
ScalarExpr int_var(IntVarId v);

ScalarExpr seq_expr(SeqAttr attr, SequenceId seq, IntervalId x,
                    std::optional<Value> boundary_value = std::nullopt,
                    std::optional<Value> absent_value = std::nullopt);
inline ScalarExpr next_arg(SequenceId s, IntervalId x) {
  return seq_expr(SeqAttr::NextArg, s, x);
}
inline ScalarExpr prev_arg(SequenceId s, IntervalId x) {
  return seq_expr(SeqAttr::PrevArg, s, x);
}

ScalarExpr arith(ArithOp op, std::vector<ScalarExpr> args);
ScalarExpr abs_of(ScalarExpr e);
ScalarExpr expr_min(std::vector<ScalarExpr> args);
ScalarExpr expr_max(std::vector<ScalarExpr> args);
ScalarExpr sum_of(std::vector<ScalarExpr> args);
ScalarExpr overlap_length(IntervalId a, IntervalId b);

ScalarExpr element(ElementArray array, ScalarExpr index);
ScalarExpr element2d(ElementMatrix matrix, ScalarExpr row, ScalarExpr col);

ScalarExpr aggregate(AggKind kind, std::vector<IntervalId> intervals);
inline ScalarExpr count_present(std::vector<IntervalId> xs) {
  return aggregate(AggKind::CountPresent, std::move(xs));
}
inline ScalarExpr earliest_start(std::vector<IntervalId> xs) {
  return aggregate(AggKind::EarliestStart, std::move(xs));
}
inline ScalarExpr latest_end(std::vector<IntervalId> xs) {
  return aggregate(AggKind::LatestEnd, std::move(xs));
}
inline ScalarExpr span_length(std::vector<IntervalId> xs) {
  return aggregate(AggKind::SpanLength, std::move(xs));
}
inline ScalarExpr makespan(std::vector<IntervalId> xs) {
  return aggregate(AggKind::Makespan, std::move(xs));
}

ScalarExpr height_at_start(IntervalId x, const CumulExpr &cumul,
                           Value absent_value = 0);
ScalarExpr height_at_end(IntervalId x, const CumulExpr &cumul,
                         Value absent_value = 0);

ScalarExpr operator+(const ScalarExpr &a, const ScalarExpr &b);
ScalarExpr operator-(const ScalarExpr &a, const ScalarExpr &b);
ScalarExpr operator*(const ScalarExpr &a, const ScalarExpr &b);
ScalarExpr operator/(const ScalarExpr &a, const ScalarExpr &b);

BoolExpr compare(CmpOp op, const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator<(const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator<=(const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator==(const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator!=(const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator>=(const ScalarExpr &a, const ScalarExpr &b);
BoolExpr operator>(const ScalarExpr &a, const ScalarExpr &b);

BoolExpr all_of(std::vector<BoolExpr> args);
BoolExpr any_of(std::vector<BoolExpr> args);
BoolExpr xor_of(std::vector<BoolExpr> args);
BoolExpr operator&&(const BoolExpr &a, const BoolExpr &b);
BoolExpr operator||(const BoolExpr &a, const BoolExpr &b);
BoolExpr operator!(const BoolExpr &a);
BoolExpr implies(const BoolExpr &a, const BoolExpr &b);
BoolExpr presence_lit(IntervalId x);

/// Intervals, sequences and int vars a tree mentions (with duplicates).
struct References {
  std::vector<IntervalId> intervals;
  std::vector<SequenceId> sequences;
  std::vector<IntVarId> int_vars;
};
void collect(const ScalarExpr &e, References &out);
void collect(const BoolExpr &e, References &out);

} // namespace cpsched

#endif // CPSCHED_EXPR_HPP
