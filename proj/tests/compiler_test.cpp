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
#include "cpsched/solver.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"

#include <doctest.h>

#include <set>

using namespace cpsched;
using cpsched::testing::absent;
using cpsched::testing::assignment;
using cpsched::testing::at;
using cpsched::testing::compiled_solutions;
using cpsched::testing::oracle_solutions;
using cpsched::testing::task;

namespace {

template <typename T> std::size_t count_of(const flat::Model &f) {
  std::size_t n = 0;
  for (const auto &c : f.constraints)
    n += std::holds_alternative<T>(c) ? 1 : 0;
  return n;
}

/// Constraints a record adds on top of the interval definitions.
std::vector<flat::Constraint> added_by(const Model &base, const Model &with,
                                       const CompileOptions &opts = {}) {
  const auto a = compile_model(base, opts).flat;
  const auto b = compile_model(with, opts).flat;
  return {b.constraints.begin() + static_cast<std::ptrdiff_t>(a.constraints.size()),
          b.constraints.end()};
}

template <typename T> std::size_t count_of(const std::vector<flat::Constraint> &cs) {
  std::size_t n = 0;
  for (const auto &c : cs)
    n += std::holds_alternative<T>(c) ? 1 : 0;
  return n;
}

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

IntensityProfile constant(Value v) { return {{{0, v}}, 100}; }

} // namespace

TEST_SUITE("compiler") {

TEST_CASE("mandatory interval lowering") {
  Model m;
  m.new_interval({.id = "a", .start = {0, 10}, .size = IntDomain{5}});
  const auto c = compile_model(m);
  const auto &li = c.intervals.at(0);
  CHECK_FALSE(li.p);
  CHECK(c.flat.vars[li.s].domain == flat::Domain(IntDomain{0, 10}));
  CHECK(c.flat.vars[li.l].domain == flat::Domain(IntDomain{5}));
  CHECK(c.flat.vars[li.e].domain == flat::Domain(IntDomain{5, 15}));
  CHECK(c.flat.vars[li.s].name == "a_s");
  CHECK(c.flat.vars[li.e].name == "a_e");
}

TEST_CASE("optional interval gets a presence variable") {
  Model m;
  m.new_interval({.id = "a", .start = {0, 10}, .size = IntDomain{5}, .optional = true});
  const auto c = compile_model(m);
  REQUIRE(c.intervals.at(0).p);
  const auto &p = c.flat.vars[*c.intervals[0].p];
  CHECK(p.domain == flat::Domain(IntDomain{0, 1}));
  CHECK(p.is_bool);
  CHECK(p.name == "a_p");
}

TEST_CASE("bounded interval carries the narrowed size") {
  Model m;
  m.new_interval({.id = "x", .start = {0, 4}, .end = IntDomain{10, 12}, .size = IntDomain{0, 99}});
  const auto c = compile_model(m);
  CHECK(c.flat.vars[c.intervals[0].sz].domain == flat::Domain(IntDomain{6, 12}));
}

TEST_CASE("presence guard") {
  const auto phi = flat::ge(flat::var(1), flat::var(0));
  const auto plain = guard({}, phi);
  CHECK(plain.op() == flat::Op::Ge);
  const auto one = guard({flat::var(2)}, phi);
  for (Value s = 0; s < 3; ++s)
    for (Value e = 0; e < 3; ++e)
      CHECK(flat::evaluate(one, {e, s, 0}) == 1);
  const auto two = guard({flat::var(2), flat::var(3)}, phi);
  CHECK(flat::evaluate(two, {3, 1, 1, 1}) == 0);
  CHECK(flat::evaluate(two, {1, 3, 1, 1}) == 1);
  CHECK(flat::evaluate(two, {3, 1, 1, 0}) == 1);
}

TEST_CASE("sequence no-overlap strategies") {
  auto build = [](bool optional, std::size_t n, bool post, Value size_lb = 1) {
    Model m;
    std::vector<IntervalId> xs;
    for (std::size_t i = 0; i < n; ++i)
      xs.push_back(task(m, "t" + std::to_string(i), {size_lb, 2}, 8, optional));
    const auto s = m.new_sequence("s", xs);
    if (post)
      post_seq_no_overlap(m, s);
    return m;
  };
  SUBCASE("mandatory members use the global") {
    const auto cs = added_by(build(false, 3, false), build(false, 3, true));
    CHECK(cs.size() == 1);
    CHECK(count_of<flat::NoOverlap>(cs) == 1);
  }
  SUBCASE("optional members use guarded disjunctions") {
    const auto cs = added_by(build(true, 3, false), build(true, 3, true));
    CHECK(cs.size() == 3);
    CHECK(count_of<flat::Intension>(cs) == 3);
  }
  SUBCASE("zero-length members fall back to disjunctions") {
    const auto cs = added_by(build(false, 3, false, 0), build(false, 3, true, 0));
    CHECK(count_of<flat::NoOverlap>(cs) == 0);
    CHECK(count_of<flat::Intension>(cs) == 3);
  }
  SUBCASE("unary cumulative uses presence as height") {
    const CompileOptions unary{.strategy = NoOverlapStrategy::UnaryCumulative};
    const auto with = build(true, 2, true);
    const auto cs = added_by(build(true, 2, false), with, unary);
    REQUIRE(cs.size() == 1);
    const auto *cu = std::get_if<flat::Cumulative>(&cs[0]);
    REQUIRE(cu);
    CHECK(cu->cap == 1);
    const auto c = compile_model(with, unary);
    CHECK(cu->heights[0] == flat::Operand::of_var(*c.intervals[0].p));
    CHECK(cu->heights[1] == flat::Operand::of_var(*c.intervals[1].p));
  }
  SUBCASE("unary cumulative refuses transitions") {
    Model m;
    const auto a = task(m, "a", {1}, 6, true);
    const auto b = task(m, "b", {1}, 6, true);
    post_seq_no_overlap(m, m.new_sequence("s", {a, b}), Matrix{{0, 1}, {1, 0}});
    CHECK(code_of([&] {
            compile_model(m, {.strategy = NoOverlapStrategy::UnaryCumulative});
          }) == ErrorCode::StrategyUnsupported);
  }
}

TEST_CASE("cumulative lowering") {
  Model base;
  const auto a = task(base, "a", {2}, 6);
  const auto b = task(base, "b", {3}, 6);
  SUBCASE("pulses become a global") {
    Model m = base;
    post_cumul_le(m, pulse(a, 2) + pulse(b, 1), 2);
    const auto cs = added_by(base, m);
    REQUIRE(cs.size() == 1);
    CHECK(std::holds_alternative<flat::Cumulative>(cs[0]));
  }
  SUBCASE("steps are decomposed") {
    Model m = base;
    post_cumul_le(m, pulse(a, 2) + step_at_end(b, 1), 2);
    const auto cs = added_by(base, m);
    CHECK(count_of<flat::Cumulative>(cs) == 0);
    CHECK(count_of<flat::Intension>(cs) > 0);
  }
  SUBCASE("empty profile adds nothing") {
    Model m = base;
    post_cumul_bound(m, CumulBoundKind::CumulRange, CumulExpr{}, AllTime{}, 0, 3);
    CHECK(added_by(base, m).empty());
  }
}

TEST_CASE("intensity tables") {
  SUBCASE("documented tuples") {
    Model m;
    const auto x = m.new_interval({.id = "x",
                                   .start = {0, 10},
                                   .size = IntDomain{10},
                                   .length = IntDomain{0, 30},
                                   .intensity = IntensityProfile{{{0, 100}, {10, 50}}, 100}});
    const auto table = intensity_table(m.interval(x), 40, 1000);
    const std::set<std::vector<Value>> rows(table.begin(), table.end());
    CHECK(rows.count({0, 10, 10}) == 1);
    CHECK(rows.count({5, 10, 15}) == 1);
    CHECK(rows.count({10, 10, 20}) == 1);
  }
  SUBCASE("full intensity means length equals size") {
    Model m;
    const auto x = m.new_interval({.id = "x",
                                   .start = {0, 4},
                                   .size = IntDomain{2, 3},
                                   .length = IntDomain{0, 10},
                                   .intensity = constant(100)});
    std::set<std::vector<Value>> expected;
    for (Value s = 0; s <= 4; ++s)
      for (Value sz = 2; sz <= 3; ++sz)
        expected.insert({s, sz, sz});
    const auto table = intensity_table(m.interval(x), 20, 1000);
    CHECK(std::set<std::vector<Value>>(table.begin(), table.end()) == expected);
  }
  SUBCASE("half intensity doubles the length") {
    Model m;
    const auto x = m.new_interval({.id = "x",
                                   .start = {0, 4},
                                   .size = IntDomain{3},
                                   .length = IntDomain{0, 10},
                                   .intensity = constant(50)});
    const auto table = intensity_table(m.interval(x), 20, 1000);
    CHECK(table.size() == 5);
    for (const auto &row : table)
      CHECK(row[2] == 6);
  }
  SUBCASE("limits") {
    Model m;
    const auto x = m.new_interval({.id = "x",
                                   .start = {0, 10},
                                   .size = IntDomain{10},
                                   .length = IntDomain{0, 30},
                                   .intensity = constant(50)});
    CHECK(code_of([&] { intensity_table(m.interval(x), 40, 3); }) == ErrorCode::TupleExplosion);
    CHECK(code_of([&] { compile_model(m, {.horizon_override = 15}); }) ==
          ErrorCode::NoFeasibleTuple);

    Model opt;
    opt.new_interval({.id = "y",
                      .start = {0, 10},
                      .size = IntDomain{10},
                      .length = IntDomain{0, 30},
                      .optional = true,
                      .intensity = constant(50)});
    const auto c = compile_model(opt, {.horizon_override = 15});
    CHECK(c.flat.vars[*c.intervals[0].p].domain == flat::Domain(IntDomain{0}));
  }
}

TEST_CASE("element lowering") {
  SUBCASE("fixed index") {
    Model m;
    const auto i = m.new_int_var("i", {1, 1});
    const auto v = m.new_int_var("v", {0, 10});
    post_raw(m, element(ElementArray{{4, 7, 9}}, int_var(i)) == int_var(v));
    const auto sols = compiled_solutions(m);
    REQUIRE(sols.size() == 1);
    CHECK(sols.begin()->int_vars == std::vector<Value>{1, 7});
  }
  SUBCASE("index domain wider than the table") {
    Model m;
    const auto r = m.new_int_var("r", {0, 1});
    const auto k = m.new_int_var("k", {0, 3});
    post_raw(m, element2d(ElementMatrix{{{1, 2, 3}, {4, 5, 6}}}, int_var(r), int_var(k)) >= 0);
    CHECK(code_of([&] { compile_model(m); }) == ErrorCode::IndexDomainExceedsTable);
  }
  SUBCASE("boundary column for the last member") {
    Model m;
    const auto a = task(m, "a", {1}, 3);
    const auto b = task(m, "b", {1}, 3);
    const auto s = m.new_sequence("s", {a, b});
    post_seq_no_overlap(m, s);
    const auto gap = m.new_int_var("gap", {0, 20});
    const ElementMatrix setup{{{0, 4}, {5, 0}}, 9, 7};
    post_raw(m, element2d(setup, ScalarExpr(0), next_arg(s, a)) == int_var(gap));
    const auto sols = compiled_solutions(m);
    CHECK(sols == oracle_solutions(m));
    for (const auto &asn : sols) {
      const bool a_last = asn.intervals[0].start > asn.intervals[1].start;
      CHECK(asn.int_vars[0] == (a_last ? 9 : 4));
    }
  }
}

TEST_CASE("expression lowering") {
  SUBCASE("precedence formula over mandatory intervals") {
    Model base;
    const auto a = task(base, "a", {2}, 6);
    const auto b = task(base, "b", {2}, 6);
    Model m = base;
    post_raw(m, start_of(b) >= end_of(a) + ScalarExpr(2));
    const auto cs = added_by(base, m);
    REQUIRE(cs.size() == 1);
    const auto c = compile_model(m);
    const auto vars = flat::scope(cs[0]);
    CHECK(std::set<flat::VarIndex>(vars.begin(), vars.end()) ==
          std::set<flat::VarIndex>{c.intervals[0].e, c.intervals[1].s});
  }
  SUBCASE("makespan objective gets its own variable") {
    Model m;
    const auto a = task(m, "a", {2}, 5);
    const auto b = task(m, "b", {1, 3}, 5);
    m.minimize(makespan({a, b}));
    const auto c = compile_model(m);
    REQUIRE(c.flat.objective);
    const auto mk = c.flat.objective->var;
    for (const auto &sol : solver::enumerate_all(c.flat, 1'000'000)) {
      const auto d = decode(c, sol);
      CHECK(sol[mk] == std::max(d.intervals[0].end, d.intervals[1].end));
    }
  }
  SUBCASE("count of present intervals") {
    Model m;
    const auto a = task(m, "a", {1}, 3, true);
    const auto b = task(m, "b", {1}, 3, true);
    const auto c = task(m, "c", {1}, 3, true);
    post_raw(m, count_present({a, b, c}) == ScalarExpr(2));
    const auto sols = compiled_solutions(m);
    CHECK(sols == oracle_solutions(m));
    for (const auto &s : sols)
      CHECK(s.intervals[0].present + s.intervals[1].present + s.intervals[2].present == 2);
  }
  SUBCASE("constant zero divisor") {
    Model m;
    const auto a = task(m, "a", {1}, 3);
    CHECK(code_of([&] {
            post_raw(m, start_of(a) / ScalarExpr(0) >= 0);
            compile_model(m);
          }) == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("model-level lowering") {
  SUBCASE("empty model") {
    const auto c = compile_model(Model{});
    CHECK(c.flat.vars.empty());
    CHECK(c.flat.constraints.empty());
    CHECK_FALSE(c.flat.objective);
  }
  SUBCASE("project scheduling fragment") {
    Model m;
    std::vector<IntervalId> x;
    const std::vector<Value> dur{2, 3, 1};
    for (std::size_t i = 0; i < dur.size(); ++i)
      x.push_back(m.new_interval({.id = "x" + std::to_string(i), .start = {0, 6}, .size = IntDomain{dur[i]}}));
    end_before_start(m, x[0], x[2]);
    post_cumul_le(m, pulse(x[0], 1) + pulse(x[1], 2), 2);
    post_cumul_le(m, pulse(x[1], 1) + pulse(x[2], 1), 1);
    m.minimize(end_of(x[2]));
    const auto c = compile_model(m);
    CHECK(count_of<flat::Cumulative>(c.flat) == 2);
    CHECK(c.flat.objective->var == c.intervals[2].e);
    CHECK(compiled_solutions(m) == oracle_solutions(m));
  }
  SUBCASE("flexible shop fragment") {
    Model m;
    const auto op = m.new_interval({.id = "op", .start = {0, 6}, .size = IntDomain{1, 2}});
    const auto m0 = m.new_interval({.id = "m0", .start = {0, 6}, .size = IntDomain{1}, .optional = true});
    const auto m1 = m.new_interval({.id = "m1", .start = {0, 6}, .size = IntDomain{2}, .optional = true});
    const auto other = m.new_interval({.id = "o", .start = {0, 6}, .size = IntDomain{1}, .optional = true});
    post_alternative(m, op, {m0, m1});
    post_seq_no_overlap(m, m.new_sequence("mach", {m0, other}, std::vector<Value>{0, 1}),
                        Matrix{{0, 2}, {1, 0}});
    const auto c = compile_model(m);
    CHECK(count_of<flat::NoOverlap>(c.flat) == 0);
    CHECK(compiled_solutions(m) == oracle_solutions(m));
  }
}

TEST_CASE("decode drops absent intervals") {
  Model m;
  task(m, "a", {1}, 3, true);
  const auto c = compile_model(m);
  for (const auto &sol : solver::enumerate_all(c.flat, 1000)) {
    const auto d = decode_normalized(c, sol);
    if (!d.intervals[0].present)
      CHECK(d.intervals[0] == absent());
  }
}

TEST_CASE("strategy names") {
  for (auto s : {NoOverlapStrategy::Auto, NoOverlapStrategy::Pairwise, NoOverlapStrategy::UnaryCumulative})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(NoOverlapStrategy::UnaryCumulative) == "unary-cumulative");
  CHECK_FALSE(parse_strategy("theta"));
}

}
