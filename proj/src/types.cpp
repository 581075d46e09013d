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

#include "cpsched/error.hpp"
#include "cpsched/types.hpp"

namespace cpsched {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::EmptyDomain: return "EmptyDomain";
  case ErrorCode::BadIntensity: return "BadIntensity";
  case ErrorCode::BadId: return "BadId";
  case ErrorCode::DuplicateId: return "DuplicateId";
  case ErrorCode::DuplicateInterval: return "DuplicateInterval";
  case ErrorCode::LengthMismatch: return "LengthMismatch";
  case ErrorCode::UnknownInterval: return "UnknownInterval";
  case ErrorCode::UnknownObject: return "UnknownObject";
  case ErrorCode::DivisionByZero: return "DivisionByZero";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::EmptyChildren: return "EmptyChildren";
  case ErrorCode::BadCardinality: return "BadCardinality";
  case ErrorCode::BadTransitionMatrix: return "BadTransitionMatrix";
  case ErrorCode::NotInSequence: return "NotInSequence";
  case ErrorCode::NoCommonIntervals: return "NoCommonIntervals";
  case ErrorCode::BadBounds: return "BadBounds";
  case ErrorCode::StateOutOfDomain: return "StateOutOfDomain";
  case ErrorCode::BadPeriod: return "BadPeriod";
  case ErrorCode::BadK: return "BadK";
  case ErrorCode::BadMin: return "BadMin";
  case ErrorCode::BadWindow: return "BadWindow";
  case ErrorCode::BadArgument: return "BadArgument";
  case ErrorCode::PartialAssignment: return "PartialAssignment";
  case ErrorCode::StrategyUnsupported: return "StrategyUnsupported";
  case ErrorCode::TupleExplosion: return "TupleExplosion";
  case ErrorCode::NoFeasibleTuple: return "NoFeasibleTuple";
  case ErrorCode::IndexDomainExceedsTable: return "IndexDomainExceedsTable";
  case ErrorCode::UnsupportedConstraint: return "UnsupportedConstraint";
  case ErrorCode::MalformedDocument: return "MalformedDocument";
  case ErrorCode::UnknownElement: return "UnknownElement";
  case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
  case ErrorCode::NoSolution: return "NoSolution";
  case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Value IntensityProfile::at(Value t) const {
  Value v = steps.empty() ? 0 : steps.front().value;
  for (const auto &s : steps) {
    if (s.from_t > t)
      break;
    v = s.value;
  }
  return v;
}

void validate(const IntensityProfile &profile) {
  if (profile.granularity <= 0)
    throw Error(ErrorCode::BadIntensity, "granularity must be positive");
  if (profile.steps.empty())
    throw Error(ErrorCode::BadIntensity, "profile has no steps");
  if (profile.steps.front().from_t != 0)
    throw Error(ErrorCode::BadIntensity, "first step must start at 0");
  for (std::size_t i = 0; i < profile.steps.size(); ++i) {
    const auto &s = profile.steps[i];
    if (s.value < 0 || s.value > profile.granularity)
      throw Error(ErrorCode::BadIntensity,
                  "step value outside [0, granularity]");
    if (i > 0 && s.from_t <= profile.steps[i - 1].from_t)
      throw Error(ErrorCode::BadIntensity, "step times must increase");
  }
}

Value integrate(const IntensityProfile &profile, Value start, Value length) {
  Value acc = 0;
  for (Value t = start; t < start + length; ++t)
    acc += profile.at(t);
  return acc;
}

} // namespace cpsched
