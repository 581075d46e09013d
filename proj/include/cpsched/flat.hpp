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

#ifndef CPSCHED_FLAT_HPP
#define CPSCHED_FLAT_HPP

#include "cpsched/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cpsched::flat {

/// Finite set of integers stored as sorted, disjoint, non-adjacent ranges.
class Domain {
public:
  Domain() = default;
  Domain(IntDomain range); // NOLINT(google-explicit-constructor)
  static Domain of_values(std::vector<Value> values);

  [[nodiscard]] const std::vector<IntDomain> &ranges() const { return ranges_; }
  [[nodiscard]] bool empty() const { return ranges_.empty(); }
  [[nodiscard]] Value lb() const { return ranges_.front().lb; }
  [[nodiscard]] Value ub() const { return ranges_.back().ub; }
  [[nodiscard]] Value size() const;
  [[nodiscard]] bool contains(Value v) const;
  [[nodiscard]] std::vector<Value> values() const;
  [[nodiscard]] Domain intersect(IntDomain range) const;

  friend bool operator==(const Domain &, const Domain &) = default;

private:
  std::vector<IntDomain> ranges_;
};

using VarIndex = std::size_t;

struct Var {
  std::string name;
  Domain domain;
  bool is_bool = false;
};

enum class Op {
  Const,
  Var,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Abs,
  Min,
  Max,
  And,
  Or,
  Xor,
  Not,
};

/// Functional name used by the XCSP3 intension syntax ("add", "le", ...).
std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);
bool is_boolean(Op op);

struct ExprNode;

/// Immutable expression tree over variable indices. Boolean operators
/// evaluate to 0/1.
class Expr {
public:
  Expr(Value constant); // NOLINT(google-explicit-constructor)
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  [[nodiscard]] const ExprNode &node() const { return *node_; }
  [[nodiscard]] Op op() const;
  [[nodiscard]] bool is_const() const { return op() == Op::Const; }
  [[nodiscard]] bool is_var() const { return op() == Op::Var; }
  [[nodiscard]] Value value() const;     // Const only
  [[nodiscard]] VarIndex var() const;    // Var only
  [[nodiscard]] const std::vector<Expr> &args() const;

private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Const;
  Value value = 0;
  VarIndex var = 0;
  std::vector<Expr> args;
};

Expr var(VarIndex v);
/// Builds op(args) and folds constant sub-trees. Boolean shortcuts:
/// and() with a false argument is false, or() with a true argument is true,
/// and neutral constants are dropped.
Expr make(Op op, std::vector<Expr> args);

inline Expr eq(Expr a, Expr b) { return make(Op::Eq, {std::move(a), std::move(b)}); }
inline Expr ne(Expr a, Expr b) { return make(Op::Ne, {std::move(a), std::move(b)}); }
inline Expr lt(Expr a, Expr b) { return make(Op::Lt, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return make(Op::Le, {std::move(a), std::move(b)}); }
inline Expr ge(Expr a, Expr b) { return make(Op::Ge, {std::move(a), std::move(b)}); }
inline Expr gt(Expr a, Expr b) { return make(Op::Gt, {std::move(a), std::move(b)}); }
inline Expr add(Expr a, Expr b) { return make(Op::Add, {std::move(a), std::move(b)}); }
inline Expr sub(Expr a, Expr b) { return make(Op::Sub, {std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return make(Op::Mul, {std::move(a), std::move(b)}); }
inline Expr not_(Expr a) { return make(Op::Not, {std::move(a)}); }

/// Thrown by evaluate on a zero divisor.
struct ZeroDivisor {};

/// Value of e under a total assignment. Throws ZeroDivisor.
Value evaluate(const Expr &e, const std::vector<Value> &asn);

/// Conservative range of e when each variable ranges over bounds[v].
/// Saturates instead of overflowing.
IntDomain bounds(const Expr &e, const std::vector<IntDomain> &var_bounds);

/// Variables of e in first-occurrence order, without duplicates.
std::vector<VarIndex> variables(const Expr &e);

/// A NoOverlap/Cumulative argument: a variable or a constant.
struct Operand {
  std::optional<VarIndex> var;
  Value constant = 0;

  static Operand of_var(VarIndex v) { return {v, 0}; }
  static Operand of_const(Value c) { return {std::nullopt, c}; }
  [[nodiscard]] Value eval(const std::vector<Value> &asn) const {
    return var ? asn[*var] : constant;
  }
  friend bool operator==(const Operand &, const Operand &) = default;
};

struct Intension {
  Expr expr;
};
struct Extension {
  std::vector<VarIndex> vars;
  std::vector<std::vector<Value>> tuples;
  bool positive = true;
};
/// Pairwise disjoint: e_i <= s_j or e_j <= s_i for every i < j.
struct NoOverlap {
  std::vector<VarIndex> origins;
  std::vector<Operand> lengths;
};
/// At every time point the heights of the running tasks sum to <= cap.
struct Cumulative {
  std::vector<VarIndex> origins;
  std::vector<Operand> lengths;
  std::vector<Operand> heights;
  Value cap = 0;
};
/// value = table[index] (one index) or table[row][col] (two indices).
struct Element {
  std::vector<std::vector<Value>> table; // single row when 1-D
  bool matrix = false;
  std::vector<VarIndex> index;
  VarIndex value = 0;
};

using Constraint = std::variant<Intension, Extension, NoOverlap, Cumulative, Element>;

std::vector<VarIndex> scope(const Constraint &c);

enum class Sense { Minimize, Maximize };

struct Objective {
  Sense sense = Sense::Minimize;
  VarIndex var = 0;
};

struct Model {
  std::vector<Var> vars;
  std::vector<Constraint> constraints;
  std::optional<Objective> objective;

  /// Throws EmptyDomain / DuplicateId.
  VarIndex add_var(std::string name, Domain domain, bool is_bool = false);
  [[nodiscard]] std::optional<VarIndex> find(std::string_view name) const;
  void post(Constraint c) { constraints.push_back(std::move(c)); }
};

/// Whether c holds under a total assignment. A zero divisor makes an
/// intension false; an out-of-range element index makes it false.
bool holds(const Constraint &c, const std::vector<Value> &asn);

/// Every value in its domain and every constraint holds. Throws
/// PartialAssignment when asn does not cover exactly the variables.
bool check(const Model &m, const std::vector<Value> &asn);

enum class Status { Optimum, Sat, Unsat, Timeout };
std::string_view to_string(Status s);

struct Solution {
  Status status = Status::Unsat;
  std::vector<Value> assignment; // empty unless Optimum / Sat
  std::optional<Value> objective;
  std::uint64_t nodes = 0;

  [[nodiscard]] bool has_assignment() const {
    return status == Status::Optimum || status == Status::Sat;
  }
};

} // namespace cpsched::flat

#endif // CPSCHED_FLAT_HPP
