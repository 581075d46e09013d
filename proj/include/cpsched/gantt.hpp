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

#ifndef CPSCHED_GANTT_HPP
#define CPSCHED_GANTT_HPP

#include "cpsched/eval.hpp"
#include "cpsched/flat.hpp"
#include "cpsched/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpsched::gantt {

enum class PanelKind { Intervals, Sequence, CumulativeProfile };

struct Panel {
  std::string name;
  PanelKind kind = PanelKind::Intervals;
  std::vector<IntervalId> intervals;      // Intervals
  std::optional<SequenceId> sequence;     // Sequence
  std::optional<CumulExpr> cumul;         // CumulativeProfile
  std::optional<Value> capacity;          // CumulativeProfile
};

struct Timeline {
  std::vector<Panel> panels;
  Value t0 = 0;
  Value t1 = 0;
};

/// One interval panel with every interval, one panel per sequence, and a
/// profile panel per cumul bound with an all-time window; time range
/// [0, horizon].
Timeline default_timeline(const Model &m);

/// x coordinate of time t: 100 + 900 (t - t0) / (t1 - t0).
double x_of(const Timeline &layout, Value t);

/// SVG 1.1 document, 1000 px wide and 60 px per panel. Throws NoSolution
/// when status carries no assignment and BadArgument for duplicate panel
/// names.
std::string render(flat::Status status, const Assignment &asn, const Model &m,
                   const Timeline &layout);

} // namespace cpsched::gantt

#endif // CPSCHED_GANTT_HPP
