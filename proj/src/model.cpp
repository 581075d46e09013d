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

#include "cpsched/model.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace cpsched {

namespace {

constexpr Value kNoBound = std::numeric_limits<Value>::max() / 4;

void require_nonempty(IntDomain d, const std::string &what) {
  if (d.empty())
    throw Error(ErrorCode::EmptyDomain, what);
}

bool valid_identifier(const std::string &id) {
  if (id.empty() || !std::isalpha(static_cast<unsigned char>(id.front())))
    return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

} // namespace

bool narrow_plain(IntDomain &start, IntDomain &end, IntDomain &size) {
  size = size.intersect({0, kNoBound});
  for (;;) {
    const IntDomain s = start.intersect({end.lb - size.ub, end.ub - size.lb});
    const IntDomain e = end.intersect({s.lb + size.lb, s.ub + size.ub});
    const IntDomain z = size.intersect({e.lb - s.ub, e.ub - s.lb});
    if (s.empty() || e.empty() || z.empty())
      return false;
    if (s == start && e == end && z == size)
      return true;
    start = s;
    end = e;
    size = z;
  }
}

std::vector<std::array<Value, 3>>
intensity_tuples(const IntensityProfile &profile, IntDomain start,
                 IntDomain size, IntDomain length, IntDomain end) {
  std::vector<std::array<Value, 3>> out;
  const Value last_from = profile.steps.back().from_t;
  const bool zero_tail = profile.steps.back().value == 0;
  for (Value s = start.lb; s <= start.ub; ++s) {
    const Value lcap = std::min(length.ub, end.ub - s);
    for (Value sz = std::max<Value>(size.lb, 0); sz <= size.ub; ++sz) {
      auto emit = [&](Value l) {
        if (length.contains(l) && end.contains(s + l))
          out.push_back({s, sz, l});
      };
      if (sz == 0) {
        emit(0);
        continue;
      }
      const Value target = sz * profile.granularity;
      Value acc = 0;
      Value t = s;
      while (acc < target && t - s < lcap) {
        if (zero_tail && t >= last_from)
          break;
        acc += profile.at(t);
        ++t;
      }
      if (acc != target)
        continue;
      // Zero-intensity time right after the work completes extends length.
      for (Value l = t - s; l <= lcap; ++l) {
        emit(l);
        if (profile.at(s + l) != 0)
          break;
      }
    }
  }
  return out;
}

IntervalVar make_interval(const IntervalSpec &spec) {
  const auto *size_dom = std::get_if<IntDomain>(&spec.size);
  if (size_dom == nullptr)
    throw Error(ErrorCode::BadArgument,
                "make_interval needs a size domain; use Model::new_interval");
  require_nonempty(spec.start, spec.id + ": start");
  require_nonempty(*size_dom, spec.id + ": size");
  if (spec.end)
    require_nonempty(*spec.end, spec.id + ": end");
  if (spec.length)
    require_nonempty(*spec.length, spec.id + ": length");

  IntervalVar iv;
  iv.id = spec.id;
  iv.optional = spec.optional;
  iv.start = spec.start;
  iv.size = *size_dom;

  if (!spec.intensity) {
    iv.size = iv.size.intersect(spec.length.value_or(iv.size));
    iv.end = spec.end.value_or(
        IntDomain{iv.start.lb + std::max<Value>(iv.size.lb, 0),
                  iv.start.ub + iv.size.ub});
    if (iv.size.empty() || !narrow_plain(iv.start, iv.end, iv.size))
      throw Error(ErrorCode::EmptyDomain, spec.id + ": narrowing emptied a domain");
    iv.length = iv.size;
    return iv;
  }

  validate(*spec.intensity);
  if (spec.start.lb < 0)
    throw Error(ErrorCode::BadIntensity, spec.id + ": scaled interval starts before 0");
  if (spec.intensity->steps.back().value == 0 && !spec.end && !spec.length)
    throw Error(ErrorCode::BadIntensity,
                spec.id + ": profile ends at 0 and length is unbounded");
  iv.intensity = spec.intensity;
  const IntDomain length = spec.length.value_or(IntDomain{0, kNoBound});
  const IntDomain end = spec.end.value_or(IntDomain{-kNoBound, kNoBound});
  const auto tuples = intensity_tuples(*spec.intensity, iv.start,
                                       iv.size.intersect({0, kNoBound}), length, end);
  if (tuples.empty())
    throw Error(ErrorCode::EmptyDomain, spec.id + ": no (start, size, length) fits");
  IntDomain s{kNoBound, -kNoBound}, z = s, l = s, e = s;
  auto widen = [](IntDomain &d, Value v) {
    d.lb = std::min(d.lb, v);
    d.ub = std::max(d.ub, v);
  };
  for (const auto &[ts, tz, tl] : tuples) {
    widen(s, ts);
    widen(z, tz);
    widen(l, tl);
    widen(e, ts + tl);
  }
  iv.start = s;
  iv.size = z;
  iv.length = l;
  iv.end = e;
  return iv;
}

std::optional<std::size_t> SequenceVar::position(IntervalId x) const {
  const auto it = std::find(intervals.begin(), intervals.end(), x);
  if (it == intervals.end())
    return std::nullopt;
  return static_cast<std::size_t>(it - intervals.begin());
}

Value SequenceVar::boundary_sentinel() const {
  Value top = static_cast<Value>(intervals.size());
  for (Value t : types)
    top = std::max(top, t + 1);
  return top;
}

// --- Model ------------------------------------------------------------------

void Model::claim_id(const std::string &id) {
  if (!valid_identifier(id))
    throw Error(ErrorCode::BadId, "'" + id + "' is not an identifier");
  if (std::find(ids_.begin(), ids_.end(), id) != ids_.end())
    throw Error(ErrorCode::DuplicateId, id);
  ids_.push_back(id);
}

IntervalId Model::new_interval(const IntervalSpec &spec) {
  IntervalSpec local = spec;
  std::optional<IntVarId> var;
  if (const auto *v = std::get_if<IntVarId>(&spec.size)) {
    if (v->index >= int_vars_.size())
      throw Error(ErrorCode::UnknownObject, spec.id + ": size variable");
    var = *v;
    local.size = int_vars_[v->index].domain;
  }
  IntervalVar iv = make_interval(local);
  claim_id(iv.id);
  if (var) {
    iv.size_var = var;
    int_vars_[var->index].domain = iv.size;
  }
  intervals_.push_back(std::move(iv));
  return IntervalId{intervals_.size() - 1};
}

SequenceId Model::new_sequence(std::string id, std::vector<IntervalId> intervals,
                               std::optional<std::vector<Value>> types) {
  if (intervals.empty())
    throw Error(ErrorCode::EmptyChildren, id + ": empty sequence");
  std::set<std::size_t> seen;
  for (auto x : intervals) {
    require(x);
    if (!seen.insert(x.index).second)
      throw Error(ErrorCode::DuplicateInterval, id + ": " + interval(x).id);
  }
  SequenceVar seq;
  seq.id = std::move(id);
  if (types) {
    if (types->size() != intervals.size())
      throw Error(ErrorCode::LengthMismatch, seq.id + ": types");
    for (Value t : *types)
      if (t < 0)
        throw Error(ErrorCode::BadArgument, seq.id + ": negative type");
    seq.types = std::move(*types);
  } else {
    for (std::size_t i = 0; i < intervals.size(); ++i)
      seq.types.push_back(static_cast<Value>(i));
  }
  seq.intervals = std::move(intervals);
  claim_id(seq.id);
  sequences_.push_back(std::move(seq));
  return SequenceId{sequences_.size() - 1};
}

StateId Model::new_state_function(std::string id, IntDomain state_domain) {
  require_nonempty(state_domain, id + ": state domain");
  claim_id(id);
  states_.push_back({std::move(id), state_domain});
  return StateId{states_.size() - 1};
}

IntVarId Model::new_int_var(std::string id, IntDomain domain) {
  require_nonempty(domain, id);
  claim_id(id);
  int_vars_.push_back({std::move(id), domain});
  return IntVarId{int_vars_.size() - 1};
}

const ConstraintRecord &Model::post(ConstraintRecord record) {
  constraints_.push_back(std::move(record));
  return constraints_.back();
}

void Model::minimize(ScalarExpr expr) {
  References refs;
  collect(expr, refs);
  require(refs);
  objective_ = Objective{Sense::Minimize, std::move(expr)};
}

void Model::maximize(ScalarExpr expr) {
  References refs;
  collect(expr, refs);
  require(refs);
  objective_ = Objective{Sense::Maximize, std::move(expr)};
}

const IntervalVar &Model::interval(IntervalId x) const {
  require(x);
  return intervals_[x.index];
}
const SequenceVar &Model::sequence(SequenceId s) const {
  require(s);
  return sequences_[s.index];
}
const StateFunction &Model::state(StateId f) const {
  require(f);
  return states_[f.index];
}
const IntVar &Model::int_var(IntVarId v) const {
  if (v.index >= int_vars_.size())
    throw Error(ErrorCode::UnknownObject, "int var #" + std::to_string(v.index));
  return int_vars_[v.index];
}

std::optional<IntervalId> Model::find_interval(std::string_view id) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i)
    if (intervals_[i].id == id)
      return IntervalId{i};
  return std::nullopt;
}

std::optional<SequenceId> Model::find_sequence(std::string_view id) const {
  for (std::size_t i = 0; i < sequences_.size(); ++i)
    if (sequences_[i].id == id)
      return SequenceId{i};
  return std::nullopt;
}

Value Model::horizon() const {
  if (horizon_)
    return *horizon_;
  Value h = 0;
  for (const auto &iv : intervals_)
    h = std::max({h, iv.start.ub, iv.end.ub});
  return h;
}

Value Model::time_origin() const {
  Value t = 0;
  for (const auto &iv : intervals_)
    t = std::min(t, iv.start.lb);
  return t;
}

void Model::require(IntervalId x) const {
  if (x.index >= intervals_.size())
    throw Error(ErrorCode::UnknownInterval, "interval #" + std::to_string(x.index));
}
void Model::require(SequenceId s) const {
  if (s.index >= sequences_.size())
    throw Error(ErrorCode::UnknownObject, "sequence #" + std::to_string(s.index));
}
void Model::require(StateId f) const {
  if (f.index >= states_.size())
    throw Error(ErrorCode::UnknownObject, "state function #" + std::to_string(f.index));
}
void Model::require(const References &refs) const {
  for (auto x : refs.intervals)
    require(x);
  for (auto s : refs.sequences)
    require(s);
  for (auto v : refs.int_vars)
    (void)int_var(v);
}

} // namespace cpsched
