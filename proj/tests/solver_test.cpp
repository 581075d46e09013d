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
#include "cpsched/families.hpp"
#include "cpsched/solver.hpp"

#include <doctest.h>

#include <array>
#include <limits>

using namespace cpsched;
using namespace cpsched::flat;
using FlatModel = cpsched::flat::Model;

namespace {

// Exhaustive search over all start times in [0, horizon] for a job shop.
Value brute_force_makespan(const Matrix &dur, const Matrix &mach, Value horizon) {
  const std::size_t jobs = dur.size(), ops = dur[0].size();
  const std::size_t n = jobs * ops;
  std::vector<Value> s(n, 0);
  Value best = std::numeric_limits<Value>::max();
  for (;;) {
    bool ok = true;
    for (std::size_t j = 0; j < jobs && ok; ++j)
      for (std::size_t k = 0; k + 1 < ops && ok; ++k)
        ok = s[j * ops + k] + dur[j][k] <= s[j * ops + k + 1];
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = a + 1; b < n && ok; ++b) {
        const auto ja = a / ops, ka = a % ops, jb = b / ops, kb = b % ops;
        if (mach[ja][ka] != mach[jb][kb])
          continue;
        ok = s[a] + dur[ja][ka] <= s[b] || s[b] + dur[jb][kb] <= s[a];
      }
    if (ok) {
      Value mk = 0;
      for (std::size_t j = 0; j < jobs; ++j)
        mk = std::max(mk, s[j * ops + ops - 1] + dur[j][ops - 1]);
      best = std::min(best, mk);
    }
    std::size_t i = 0;
    while (i < n && s[i] == horizon)
      s[i++] = 0;
    if (i == n)
      break;
    ++s[i];
  }
  return best;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("two by two job shop optimum matches enumeration") {
  const Matrix dur{{2, 2}, {3, 1}}, mach{{0, 1}, {1, 0}};
  const Value expected = brute_force_makespan(dur, mach, 8);
  CHECK(expected == 5);

  const auto inst = families::load_instance("data/instances/jobshop_2x2.json");
  const auto c = compile_model(families::build_model(inst));
  const auto sol = solver::solve(c.flat);
  REQUIRE(sol.status == flat::Status::Optimum);
  CHECK(*sol.objective == expected);
  CHECK(check(c.flat, sol.assignment));

  const auto classical = solver::solve(families::build_classical(inst));
  CHECK(classical.status == flat::Status::Optimum);
  CHECK(*classical.objective == expected);
}

TEST_CASE("three by three job shop optimum matches enumeration") {
  const auto inst = families::load_instance("data/instances/jobshop_3x3.json");
  const Value expected = brute_force_makespan(inst.shop.durations, inst.shop.machines, 6);
  const auto sol = solver::solve(compile_model(families::build_model(inst)).flat);
  REQUIRE(sol.status == flat::Status::Optimum);
  CHECK(*sol.objective == expected);
}

TEST_CASE("contradictory bounds are unsatisfiable") {
  FlatModel m;
  const auto s = m.add_var("s", IntDomain{0, 10});
  m.post(Intension{ge(var(s), 5)});
  m.post(Intension{le(var(s), 3)});
  const auto sol = solver::solve(m);
  CHECK(sol.status == flat::Status::Unsat);
  CHECK_FALSE(sol.has_assignment());
  CHECK(solver::enumerate_all(m, 100).empty());
}

TEST_CASE("budgets never claim optimality") {
  const auto inst = families::load_instance("data/instances/jobshop_3x3.json");
  const auto f = compile_model(families::build_model(inst)).flat;
  const auto one = solver::solve(f, {.max_nodes = 1});
  CHECK((one.status == flat::Status::Timeout || one.status == flat::Status::Sat));
  const auto none = solver::solve(f, {.max_nodes = 0});
  CHECK(none.status == flat::Status::Timeout);
  for (std::uint64_t n : {5u, 20u, 60u}) {
    const auto part = solver::solve(f, {.max_nodes = n});
    CHECK(part.status != flat::Status::Unsat);
    if (part.has_assignment())
      CHECK(check(f, part.assignment));
  }
}

TEST_CASE("satisfaction problems stop at the first solution") {
  FlatModel m;
  const auto x = m.add_var("x", IntDomain{0, 3});
  const auto y = m.add_var("y", IntDomain{0, 3});
  m.post(Intension{lt(var(x), var(y))});
  const auto sol = solver::solve(m);
  CHECK(sol.status == flat::Status::Sat);
  CHECK(sol.assignment == std::vector<Value>{0, 1});
}

TEST_CASE("maximisation") {
  FlatModel m;
  const auto x = m.add_var("x", IntDomain{0, 9});
  const auto y = m.add_var("y", IntDomain{0, 9});
  m.post(Intension{le(add(var(x), var(y)), 7)});
  m.post(Intension{eq(var(y), 2)});
  m.objective = flat::Objective{flat::Sense::Maximize, x};
  const auto sol = solver::solve(m);
  CHECK(sol.status == flat::Status::Optimum);
  CHECK(*sol.objective == 5);
}

TEST_CASE("enumeration order and limits") {
  FlatModel one;
  one.add_var("d", IntDomain{0, 1});
  CHECK(solver::enumerate_all(one, 10) == std::vector<std::vector<Value>>{{0}, {1}});

  FlatModel two;
  const auto a = two.add_var("a", IntDomain{0, 1});
  const auto b = two.add_var("b", IntDomain{0, 1});
  two.post(NoOverlap{{a, b}, {Operand::of_const(1), Operand::of_const(1)}});
  CHECK(solver::enumerate_all(two, 10) == std::vector<std::vector<Value>>{{0, 1}, {1, 0}});

  try {
    solver::enumerate_all(two, 3);
    FAIL("cap ignored");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::SearchSpaceTooLarge);
  }
}

TEST_CASE("globals propagate to the same answers as enumeration") {
  FlatModel m;
  std::vector<VarIndex> s;
  for (int i = 0; i < 4; ++i)
    s.push_back(m.add_var("s" + std::to_string(i), IntDomain{0, 4}));
  const auto h = m.add_var("h", IntDomain{1, 2});
  m.post(Cumulative{s,
                    {Operand::of_const(2), Operand::of_const(1), Operand::of_const(2), Operand::of_const(1)},
                    {Operand::of_const(1), Operand::of_var(h), Operand::of_const(2), Operand::of_const(1)},
                    3});
  const auto mk = m.add_var("mk", IntDomain{0, 10});
  m.post(Intension{eq(var(mk), make(Op::Max, {add(var(s[0]), 2), add(var(s[1]), 1),
                                               add(var(s[2]), 2), add(var(s[3]), 1)}))});
  m.post(Intension{eq(var(h), 2)});
  m.objective = flat::Objective{flat::Sense::Minimize, mk};

  std::optional<Value> best;
  for (const auto &asn : solver::enumerate_all(m, 10'000'000))
    best = best ? std::min(*best, asn[mk]) : asn[mk];
  const auto sol = solver::solve(m);
  REQUIRE(sol.status == flat::Status::Optimum);
  CHECK(sol.objective == best);
}

}
