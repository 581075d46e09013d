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

#ifndef CPSCHED_TESTS_ORACLE_HPP
#define CPSCHED_TESTS_ORACLE_HPP

// Brute-force reference semantics used by the tests. Nothing here goes
// through the compiler or the solver.

#include "cpsched/compiler.hpp"
#include "cpsched/eval.hpp"
#include "cpsched/solver.hpp"

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace cpsched::testing {

using AssignmentSet = std::set<Assignment>;

/// Every well-formed assignment of the model (absent intervals normalized),
/// whether or not the constraints hold.
inline void for_each_candidate(const Model &m, const std::function<void(const Assignment &)> &f) {
  Assignment asn;
  asn.intervals.resize(m.intervals().size());
  asn.int_vars.resize(m.int_vars().size());
  const Value origin = m.time_origin();
  const Value horizon = m.horizon();

  std::function<void(std::size_t)> intervals = [&](std::size_t i) {
    if (i == m.intervals().size()) {
      if (well_formed(m, asn))
        f(asn);
      return;
    }
    const auto &iv = m.intervals()[i];
    auto &x = asn.intervals[i];
    if (iv.optional) {
      x = IntervalValue{false, 0, 0, 0, 0};
      intervals(i + 1);
    }
    x.present = true;
    for (Value s = std::max(iv.start.lb, origin); s <= iv.start.ub; ++s) {
      for (Value sz = iv.size.lb; sz <= iv.size.ub; ++sz) {
        if (iv.size_var && asn.int_vars[iv.size_var->index] != sz)
          continue;
        const Value lmin = iv.scaled() ? iv.length.lb : sz;
        const Value lmax = iv.scaled() ? iv.length.ub : sz;
        for (Value l = lmin; l <= lmax; ++l) {
          if (s + l > horizon)
            break;
          x = IntervalValue{true, s, s + l, sz, l};
          intervals(i + 1);
        }
      }
    }
  };
  std::function<void(std::size_t)> vars = [&](std::size_t k) {
    if (k == m.int_vars().size()) {
      intervals(0);
      return;
    }
    const auto &d = m.int_vars()[k].domain;
    for (Value v = d.lb; v <= d.ub; ++v) {
      asn.int_vars[k] = v;
      vars(k + 1);
    }
  };
  vars(0);
}

/// Solutions by the semantic checker.
inline AssignmentSet oracle_solutions(const Model &m) {
  AssignmentSet out;
  for_each_candidate(m, [&](const Assignment &a) {
    if (satisfies(m, a))
      out.insert(a);
  });
  return out;
}

/// Solutions of the compiled model, decoded.
inline AssignmentSet compiled_solutions(const Model &m, const CompileOptions &opts = {},
                                        std::uint64_t cap = 1'000'000'000'000ULL) {
  const auto c = compile_model(m, opts);
  AssignmentSet out;
  for (const auto &asn : solver::enumerate_all(c.flat, cap))
    out.insert(decode_normalized(c, asn));
  return out;
}

/// Best objective value over the oracle solutions.
inline std::optional<Value> oracle_optimum(const Model &m) {
  std::optional<Value> best;
  const auto &obj = *m.objective();
  for_each_candidate(m, [&](const Assignment &a) {
    if (!satisfies(m, a))
      return;
    const Value v = eval_scalar(m, obj.expr, a);
    if (!best || (obj.sense == Sense::Minimize ? v < *best : v > *best))
      best = v;
  });
  return best;
}

} // namespace cpsched::testing

#endif // CPSCHED_TESTS_ORACLE_HPP
