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
#include "cpsched/model.hpp"
#include "support/builders.hpp"

#include <doctest.h>

using namespace cpsched;
using cpsched::testing::absent;
using cpsched::testing::assignment;
using cpsched::testing::at;
using cpsched::testing::task;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

struct Fixture {
  Model m;
  IntervalId a, b, c;
  Fixture(bool optional = true) {
    a = task(m, "a", {0, 10}, 12, optional);
    b = task(m, "b", {0, 10}, 12, optional);
    c = task(m, "c", {0, 10}, 12, optional);
  }
  bool check(const ConstraintRecord &r, std::vector<IntervalValue> v) {
    const auto asn = assignment(std::move(v));
    const bool h = holds(m, r, asn);
    if (r.formula)
      CHECK(holds_formula(m, r, asn) == h);
    return h;
  }
};

} // namespace

TEST_SUITE("constraints") {

TEST_CASE("end before start with delay") {
  Fixture f;
  const auto r0 = make_precedence(f.m, PrecedenceKind::EndBeforeStart, f.a, f.b);
  CHECK(f.check(r0, {at(0, 3), at(3, 7), absent()}));
  const auto r2 = make_precedence(f.m, PrecedenceKind::EndBeforeStart, f.a, f.b, 2);
  CHECK_FALSE(f.check(r2, {at(0, 3), at(4, 8), absent()}));
  CHECK(f.check(r2, {at(0, 3), at(5, 8), absent()}));
}

TEST_CASE("absent operand satisfies a precedence") {
  Fixture f;
  const auto r = make_precedence(f.m, PrecedenceKind::StartAtEnd, f.a, f.b, 1);
  for (Value s = 0; s <= 5; ++s)
    CHECK(f.check(r, {absent(), at(s, s + 2), absent()}));
  CHECK(f.check(r, {at(0, 2), at(3, 5), absent()}));
  CHECK_FALSE(f.check(r, {at(0, 2), at(2, 5), absent()}));
}

TEST_CASE("precedence kinds") {
  Fixture f;
  auto chk = [&](PrecedenceKind k, IntervalValue x, IntervalValue y) {
    return f.check(make_precedence(f.m, k, f.a, f.b), {x, y, absent()});
  };
  CHECK(chk(PrecedenceKind::StartAtStart, at(2, 3), at(2, 6)));
  CHECK_FALSE(chk(PrecedenceKind::StartAtStart, at(2, 3), at(3, 6)));
  CHECK(chk(PrecedenceKind::EndAtEnd, at(2, 6), at(3, 6)));
  CHECK(chk(PrecedenceKind::StartBeforeEnd, at(2, 6), at(0, 2)));
  CHECK_FALSE(chk(PrecedenceKind::StartBeforeEnd, at(3, 6), at(0, 2)));
  CHECK(chk(PrecedenceKind::EndBeforeEnd, at(2, 4), at(0, 4)));
  CHECK(chk(PrecedenceKind::StartBeforeStart, at(2, 4), at(2, 4)));
}

TEST_CASE("unknown interval is rejected") {
  Fixture f;
  CHECK(code_of([&] { make_precedence(f.m, PrecedenceKind::EndBeforeStart, f.a, IntervalId{9}); }) ==
        ErrorCode::UnknownInterval);
}

TEST_CASE("span alternative synchronize") {
  Fixture f;
  const auto span = make_span(f.m, f.c, {f.a, f.b});
  CHECK(f.check(span, {at(1, 4), at(3, 9), at(1, 9)}));
  CHECK_FALSE(f.check(span, {at(1, 4), at(3, 9), at(1, 8)}));

  const auto alt = make_alternative(f.m, f.c, {f.a, f.b});
  CHECK(f.check(alt, {at(2, 5), absent(), at(2, 5)}));
  CHECK_FALSE(f.check(alt, {at(2, 5), at(2, 5), at(2, 5)}));
  CHECK_FALSE(f.check(alt, {at(2, 5), absent(), at(2, 6)}));
  CHECK(f.check(alt, {absent(), absent(), absent()}));

  const auto sync = make_synchronize(f.m, f.c, {f.a, f.b});
  CHECK(f.check(sync, {at(2, 5), absent(), at(2, 5)}));
  CHECK_FALSE(f.check(sync, {at(2, 5), at(2, 6), at(2, 5)}));

  CHECK(code_of([&] { make_span(f.m, f.c, {}); }) == ErrorCode::EmptyChildren);
  CHECK(code_of([&] { make_alternative(f.m, f.c, {f.a, f.b}, 3); }) == ErrorCode::BadCardinality);
  CHECK(code_of([&] { make_alternative(f.m, f.c, {f.a, f.b}, 0); }) == ErrorCode::BadCardinality);
}

TEST_CASE("sequence no-overlap") {
  Fixture f;
  const auto s = f.m.new_sequence("s", {f.a, f.b});
  const auto plain = make_seq_no_overlap(f.m, s);
  CHECK(f.check(plain, {at(0, 2), at(2, 5), absent()}));
  CHECK_FALSE(f.check(plain, {at(0, 3), at(2, 5), absent()}));
  CHECK(f.check(plain, {absent(), at(0, 5), absent()}));

  const auto gaps = make_seq_no_overlap(f.m, s, Matrix{{0, 2}, {2, 0}});
  CHECK_FALSE(f.check(gaps, {at(0, 2), at(3, 5), absent()}));
  CHECK(f.check(gaps, {at(0, 2), at(4, 6), absent()}));

  CHECK(code_of([&] { make_seq_no_overlap(f.m, s, Matrix{{0}}); }) ==
        ErrorCode::BadTransitionMatrix);
  CHECK(code_of([&] { make_seq_no_overlap(f.m, s, Matrix{{0, 1}, {1}}); }) ==
        ErrorCode::BadTransitionMatrix);
}

TEST_CASE("direct transitions apply to consecutive members only") {
  Fixture f;
  const auto s = f.m.new_sequence("s", {f.a, f.b, f.c});
  const Matrix d{{0, 0, 5}, {0, 0, 0}, {0, 0, 0}};
  const auto direct = make_seq_no_overlap(f.m, s, d, true);
  const auto all = make_seq_no_overlap(f.m, s, d, false);
  // a, b, c back to back: a -> c is not consecutive.
  CHECK(f.check(direct, {at(0, 1), at(1, 2), at(2, 3)}));
  CHECK_FALSE(f.check(all, {at(0, 1), at(1, 2), at(2, 3)}));
  CHECK_FALSE(f.check(direct, {at(0, 1), absent(), at(2, 3)}));
}

TEST_CASE("sequence order constraints") {
  Fixture f;
  const auto s = f.m.new_sequence("s", {f.a, f.b, f.c});
  CHECK(f.check(make_sequence_order(f.m, SeqOrderKind::First, s, f.a),
                {at(0, 1), at(2, 3), at(5, 6)}));
  CHECK_FALSE(f.check(make_sequence_order(f.m, SeqOrderKind::Last, s, f.a),
                      {at(0, 1), at(2, 3), at(5, 6)}));
  const auto prev = make_sequence_order(f.m, SeqOrderKind::Previous, s, f.a, f.b);
  CHECK_FALSE(f.check(prev, {at(0, 1), at(5, 6), at(2, 3)}));
  CHECK(f.check(prev, {at(0, 1), at(5, 6), absent()}));
  const auto before = make_sequence_order(f.m, SeqOrderKind::Before, s, f.a, f.b);
  CHECK(f.check(before, {absent(), at(0, 1), at(2, 3)}));
  CHECK_FALSE(f.check(before, {at(4, 5), at(0, 1), at(2, 3)}));

  Model other;
  const auto x = task(other, "x", {1}, 5);
  const auto y = task(other, "y", {1}, 5);
  const auto sx = other.new_sequence("sx", {x});
  CHECK(code_of([&] { make_sequence_order(other, SeqOrderKind::First, sx, y); }) ==
        ErrorCode::NotInSequence);
}

TEST_CASE("same sequence and common subsequence") {
  Model m;
  const auto x = task(m, "x", {1}, 10);
  const auto y = task(m, "y", {1}, 10);
  const auto z = task(m, "z", {1}, 10);
  const auto s1 = m.new_sequence("s1", {x, y, z});
  const auto s2 = m.new_sequence("s2", {x, y});
  const auto s3 = m.new_sequence("s3", {x, y, z});
  const auto same13 = make_same_sequence(m, SameSeqKind::SameSequence, s1, s3);
  const auto common12 = make_same_sequence(m, SameSeqKind::SameCommonSubsequence, s1, s2);
  const auto same12 = make_same_sequence(m, SameSeqKind::SameSequence, s1, s2);

  // z sits between x and y in s1 only: relative order matches, ranks do not.
  const auto asn = assignment({at(0, 1), at(4, 5), at(2, 3)});
  CHECK(holds(m, same13, asn));
  CHECK(holds(m, common12, asn));
  CHECK_FALSE(holds(m, same12, asn));

  Model n;
  const auto p = task(n, "p", {1}, 5);
  const auto q = task(n, "q", {1}, 5);
  const auto sp = n.new_sequence("sp", {p});
  const auto sq = n.new_sequence("sq", {q});
  CHECK(code_of([&] { make_same_sequence(n, SameSeqKind::SameSequence, sp, sq); }) ==
        ErrorCode::NoCommonIntervals);
}

TEST_CASE("cumul bounds over pulses and steps") {
  Fixture f;
  const auto cumul = pulse(f.a, 2) + pulse(f.b, 3);
  const auto tight = make_cumul_bound(f.m, CumulBoundKind::CumulRange, cumul, AllTime{}, 0, 4);
  const auto loose = make_cumul_bound(f.m, CumulBoundKind::CumulRange, cumul, AllTime{}, 0, 5);
  CHECK_FALSE(f.check(tight, {at(0, 3), at(2, 5), absent()}));
  CHECK(f.check(loose, {at(0, 3), at(2, 5), absent()}));
  CHECK(f.check(tight, {at(0, 3), absent(), absent()}));

  const auto empty = make_cumul_bound(f.m, CumulBoundKind::CumulRange, CumulExpr{}, AllTime{}, 0, 0);
  CHECK(f.check(empty, {at(0, 3), at(2, 5), absent()}));

  // Window restricted to the extent of c.
  const auto in_c = make_cumul_bound(f.m, CumulBoundKind::AlwaysIn, cumul, f.c, 0, 3);
  CHECK(f.check(in_c, {at(0, 3), at(2, 5), at(3, 5)}));
  CHECK_FALSE(f.check(in_c, {at(0, 3), at(2, 5), at(2, 5)}));

  CHECK(code_of([&] { make_cumul_bound(f.m, CumulBoundKind::CumulRange, cumul, AllTime{}, 3, 2); }) ==
        ErrorCode::BadBounds);
}

TEST_CASE("profile heights") {
  Fixture f;
  const auto asn = assignment({at(2, 4), at(3, 6), absent()});
  CHECK(eval_scalar(f.m, height_at_start(f.a, pulse(f.a, 3)), asn) == 3);
  CHECK(eval_scalar(f.m, height_at_start(f.a, step_at(0, 5)), asn) == 5);
  const auto crossing = pulse(f.a, 2) + pulse(f.b, 4);
  // Profile sweep by hand: [2,3) 2, [3,4) 6, [4,6) 4.
  CHECK(eval_scalar(f.m, height_at_end(f.a, crossing), asn) == 4);
  CHECK(eval_scalar(f.m, height_at_start(f.b, crossing), asn) == 6);
  CHECK(profile_at(crossing, asn, 2) == 2);
  CHECK(profile_at(crossing + step_at_end(f.a, -1), asn, 5) == 3);
}

TEST_CASE("state functions") {
  SUBCASE("conflicting pins") {
    Model m;
    const auto x = task(m, "x", {3}, 10);
    const auto y = task(m, "y", {3}, 10);
    const auto fn = m.new_state_function("f", {0, 5});
    post_state(m, StateKind::RequiresState, fn, x, 2);
    post_state(m, StateKind::AlwaysEqual, fn, y, 3);
    CHECK_FALSE(satisfies(m, assignment({at(0, 3), at(1, 4)})));
    CHECK(satisfies(m, assignment({at(0, 3), at(3, 6)})));
  }
  SUBCASE("always constant alone") {
    Model m;
    const auto x = task(m, "x", {3}, 10);
    const auto fn = m.new_state_function("f", {0, 5});
    post_state(m, StateKind::AlwaysConstant, fn, x);
    CHECK(satisfies(m, assignment({at(2, 5)})));
  }
  SUBCASE("sets state then requires it") {
    Model m;
    const auto x = task(m, "x", {2}, 10);
    const auto y = task(m, "y", {2}, 10);
    const auto fn = m.new_state_function("f", {0, 3});
    post_state(m, StateKind::SetsState, fn, x, 0, 1);
    post_state(m, StateKind::RequiresState, fn, y, 1);
    CHECK(satisfies(m, assignment({at(0, 2), at(4, 6)})));
    // y covers the start of x, where the state must still be 0.
    CHECK_FALSE(satisfies(m, assignment({at(4, 6), at(3, 5)})));
  }
  SUBCASE("domain checked") {
    Model m;
    const auto x = task(m, "x", {2}, 10);
    const auto fn = m.new_state_function("f", {0, 3});
    CHECK(code_of([&] { post_state(m, StateKind::AlwaysEqual, fn, x, 7); }) ==
          ErrorCode::StateOutOfDomain);
  }
}

TEST_CASE("forbidden periods") {
  Fixture f;
  const auto fs = make_forbid(f.m, ForbidKind::Start, f.a, {{2, 4}});
  CHECK_FALSE(f.check(fs, {at(2, 3), absent(), absent()}));
  CHECK(f.check(fs, {at(4, 5), absent(), absent()}));
  const auto fe = make_forbid(f.m, ForbidKind::End, f.a, {{2, 4}});
  CHECK(f.check(fe, {at(0, 2), absent(), absent()}));
  CHECK_FALSE(f.check(fe, {at(0, 4), absent(), absent()}));
  const auto fx = make_forbid(f.m, ForbidKind::Extent, f.a, {{5, 6}});
  CHECK(f.check(fx, {at(0, 5), absent(), absent()}));
  CHECK_FALSE(f.check(fx, {at(4, 6), absent(), absent()}));
  CHECK(code_of([&] { make_forbid(f.m, ForbidKind::Start, f.a, {{4, 4}}); }) == ErrorCode::BadPeriod);
}

TEST_CASE("presence logic") {
  Fixture f;
  CHECK(f.check(make_presence(f.m, PresenceKind::ExactlyK, {f.a, f.b, f.c}, 1),
                {absent(), at(0, 1), absent()}));
  CHECK_FALSE(f.check(make_presence(f.m, PresenceKind::Xor, {f.a, f.b}),
                      {at(0, 1), at(0, 1), absent()}));
  CHECK_FALSE(f.check(make_presence(f.m, PresenceKind::AllOrNone, {f.a, f.b}),
                      {at(0, 1), absent(), absent()}));
  CHECK(f.check(make_presence(f.m, PresenceKind::Implies, {f.a, f.b}),
                {absent(), absent(), absent()}));
  CHECK_FALSE(f.check(make_presence(f.m, PresenceKind::Implies, {f.a, f.b}),
                      {at(0, 1), absent(), absent()}));
  CHECK(f.check(make_presence(f.m, PresenceKind::AtMostK, {f.a, f.b, f.c}, 2),
                {at(0, 1), at(0, 1), absent()}));
  CHECK_FALSE(f.check(make_presence(f.m, PresenceKind::AtLeastK, {f.a, f.b, f.c}, 2),
                      {at(0, 1), absent(), absent()}));
  CHECK(code_of([&] { make_presence(f.m, PresenceKind::AtMostK, {f.a, f.b}, 3); }) == ErrorCode::BadK);

  const auto inner = make_precedence(f.m, PrecedenceKind::EndBeforeStart, f.b, f.c);
  const auto ipt = make_if_present_then(f.m, f.a, inner);
  CHECK(f.check(ipt, {absent(), at(5, 6), at(0, 1)}));
  CHECK_FALSE(f.check(ipt, {at(0, 1), at(5, 6), at(0, 1)}));
}

TEST_CASE("overlap relations") {
  Fixture f;
  CHECK_FALSE(f.check(make_overlap(f.m, OverlapKind::MustOverlap, {f.a, f.b}),
                      {at(0, 3), at(3, 5), absent()}));
  CHECK(f.check(make_overlap(f.m, OverlapKind::OverlapAtLeast, {f.a, f.b}, 2),
                {at(0, 4), at(2, 6), absent()}));
  CHECK_FALSE(f.check(make_overlap(f.m, OverlapKind::OverlapAtLeast, {f.a, f.b}, 3),
                      {at(0, 4), at(2, 6), absent()}));
  CHECK_FALSE(f.check(make_overlap(f.m, OverlapKind::Disjunctive, {f.a, f.b}, 0,
                                   Matrix{{0, 1}, {1, 0}}),
                      {at(0, 2), at(2, 4), absent()}));
  CHECK(f.check(make_overlap(f.m, OverlapKind::NoOverlapPairwise, {f.a, f.b}),
                {at(0, 2), at(2, 4), absent()}));
  CHECK(code_of([&] { make_overlap(f.m, OverlapKind::OverlapAtLeast, {f.a, f.b}, 0); }) ==
        ErrorCode::BadMin);
}

TEST_CASE("chains") {
  Fixture f;
  CHECK(f.check(make_chain(f.m, {f.a, f.b}, {0}), {at(0, 2), at(3, 5), absent()}));
  CHECK_FALSE(f.check(make_chain(f.m, {f.a, f.b}, {0}, true), {at(0, 2), at(3, 5), absent()}));
  CHECK(f.check(make_chain(f.m, {f.a, f.b}, {2}), {at(0, 2), at(4, 6), absent()}));
  CHECK(f.check(make_chain(f.m, {f.a, f.b}, {2}, true), {at(0, 2), at(4, 6), absent()}));
  CHECK(code_of([&] { make_chain(f.m, {f.a, f.b}, {1, 2}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("time bounds") {
  Fixture f;
  CHECK(f.check(make_bounds(f.m, BoundsKind::ReleaseDate, f.a, 5), {at(5, 6), absent(), absent()}));
  CHECK_FALSE(f.check(make_bounds(f.m, BoundsKind::Deadline, f.a, 5), {at(5, 6), absent(), absent()}));
  CHECK(f.check(make_bounds(f.m, BoundsKind::TimeWindow, f.a, 2, 9), {at(2, 9), absent(), absent()}));
  CHECK(code_of([&] { make_bounds(f.m, BoundsKind::TimeWindow, f.a, 9, 2); }) == ErrorCode::BadWindow);
}

TEST_CASE("raw formulas over int vars") {
  Model m;
  const auto v = m.new_int_var("v", {0, 5});
  const auto a = task(m, "a", {2}, 8);
  const auto r = make_raw(m, start_of(a) >= int_var(v) + ScalarExpr(1));
  CHECK(holds(m, r, assignment({at(3, 5)}, {2})));
  CHECK_FALSE(holds(m, r, assignment({at(2, 4)}, {2})));
}

}
