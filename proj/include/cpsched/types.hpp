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

#ifndef CPSCHED_TYPES_HPP
#define CPSCHED_TYPES_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cpsched {

using Value = std::int64_t;

/// Closed integer range [lb, ub]. A fixed value v is lb = ub = v.
struct IntDomain {
  Value lb = 0;
  Value ub = 0;

  constexpr IntDomain() = default;
  constexpr IntDomain(Value fixed) : lb(fixed), ub(fixed) {} // NOLINT
  constexpr IntDomain(Value lo, Value hi) : lb(lo), ub(hi) {}

  [[nodiscard]] constexpr bool empty() const { return lb > ub; }
  [[nodiscard]] constexpr bool fixed() const { return lb == ub; }
  [[nodiscard]] constexpr bool contains(Value v) const {
    return lb <= v && v <= ub;
  }
  [[nodiscard]] constexpr Value size() const { return empty() ? 0 : ub - lb + 1; }
  [[nodiscard]] constexpr IntDomain intersect(IntDomain o) const {
    return {std::max(lb, o.lb), std::min(ub, o.ub)};
  }

  friend constexpr bool operator==(IntDomain, IntDomain) = default;
};

// Strong handles into a Model. The index is the declaration order within
// the object's kind.
template <typename Tag> struct Handle {
  std::size_t index = 0;
  friend constexpr auto operator<=>(Handle, Handle) = default;
};

using IntervalId = Handle<struct IntervalTag>;
using SequenceId = Handle<struct SequenceTag>;
using StateId = Handle<struct StateTag>;
using IntVarId = Handle<struct IntVarTag>;

/// Stepwise-constant efficiency profile. The value at time t is the value
/// of the last step whose from_t <= t.
struct IntensityProfile {
  struct Step {
    Value from_t = 0;
    Value value = 0;
    friend bool operator==(const Step &, const Step &) = default;
  };
  std::vector<Step> steps;
  Value granularity = 100;

  [[nodiscard]] Value at(Value t) const;

  friend bool operator==(const IntensityProfile &,
                         const IntensityProfile &) = default;
};

/// Throws BadIntensity when the profile is ill-formed.
void validate(const IntensityProfile &profile);

/// Work done over [start, start + length): sum of intensity(t).
Value integrate(const IntensityProfile &profile, Value start, Value length);

} // namespace cpsched

#endif // CPSCHED_TYPES_HPP
