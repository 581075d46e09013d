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

#include "cpsched/gantt.hpp"

#include "cpsched/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <sstream>

namespace cpsched::gantt {

namespace {

constexpr std::array<const char *, 12> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#8c564b"};

constexpr double kPanelHeight = 60.0;
constexpr double kTop = 14.0;    // label band inside a panel
constexpr double kBottom = 4.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

void rect(std::ostringstream &os, double x, double y, double w, double h,
          const char *fill, const std::string &title) {
  os << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
     << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"#333333\">"
     << "<title>" << escape(title) << "</title></rect>\n";
}

std::string span_title(const Model &m, IntervalId x, const IntervalValue &v) {
  return m.interval(x).id + " [" + std::to_string(v.start) + "," + std::to_string(v.end) + ")";
}

} // namespace

Timeline default_timeline(const Model &m) {
  Timeline t;
  t.t0 = std::min<Value>(0, m.time_origin());
  t.t1 = m.horizon();
  Panel all{"intervals", PanelKind::Intervals, {}, {}, {}, {}};
  for (std::size_t i = 0; i < m.intervals().size(); ++i)
    all.intervals.push_back(IntervalId{i});
  t.panels.push_back(std::move(all));
  for (std::size_t s = 0; s < m.sequences().size(); ++s)
    t.panels.push_back(
        {m.sequences()[s].id, PanelKind::Sequence, {}, SequenceId{s}, {}, {}});
  int k = 0;
  for (const auto &r : m.constraints()) {
    const auto *c = std::get_if<rec::CumulBound>(&r.payload);
    if (c == nullptr || !std::holds_alternative<AllTime>(c->window))
      continue;
    t.panels.push_back({"resource_" + std::to_string(k++), PanelKind::CumulativeProfile,
                        {}, {}, c->cumul, c->hi});
  }
  return t;
}

double x_of(const Timeline &layout, Value t) {
  const double span = layout.t1 > layout.t0 ? static_cast<double>(layout.t1 - layout.t0) : 1.0;
  return 100.0 + 900.0 * static_cast<double>(t - layout.t0) / span;
}

std::string render(flat::Status status, const Assignment &asn, const Model &m,
                   const Timeline &layout) {
  if (status != flat::Status::Optimum && status != flat::Status::Sat)
    throw Error(ErrorCode::NoSolution, "no assignment to render");
  std::set<std::string> names;
  for (const auto &p : layout.panels)
    if (!names.insert(p.name).second)
      throw Error(ErrorCode::BadArgument, "duplicate panel " + p.name);

  const double height = kPanelHeight * static_cast<double>(layout.panels.size());
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" height=\""
     << num(height) << "\" viewBox=\"0 0 1000 " << num(height) << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"1000\" height=\"" << num(height)
     << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t k = 0; k < layout.panels.size(); ++k) {
    const auto &panel = layout.panels[k];
    const double y0 = kPanelHeight * static_cast<double>(k);
    const double top = y0 + kTop;
    const double band = kPanelHeight - kTop - kBottom;
    os << "  <g id=\"panel-" << escape(panel.name) << "\">\n";
    os << "  <line x1=\"0\" y1=\"" << num(y0) << "\" x2=\"1000\" y2=\"" << num(y0)
       << "\" stroke=\"#cccccc\"/>\n";
    os << "  <text x=\"4\" y=\"" << num(y0 + 12) << "\" font-family=\"monospace\" font-size=\"11\">"
       << escape(panel.name) << "</text>\n";

    switch (panel.kind) {
    case PanelKind::Intervals: {
      std::vector<IntervalId> shown;
      for (auto x : panel.intervals)
        if (asn[x].present)
          shown.push_back(x);
      const double row = shown.empty() ? band : band / static_cast<double>(shown.size());
      for (std::size_t r = 0; r < shown.size(); ++r) {
        const auto &v = asn[shown[r]];
        const double x = x_of(layout, v.start);
        rect(os, x, top + row * static_cast<double>(r), x_of(layout, v.end) - x, row,
             kPalette[shown[r].index % kPalette.size()], span_title(m, shown[r], v));
      }
      break;
    }
    case PanelKind::Sequence: {
      const auto order = sequence_order(m, *panel.sequence, asn);
      for (std::size_t r = 0; r < order.size(); ++r) {
        const auto &v = asn[order[r]];
        const double x = x_of(layout, v.start);
        rect(os, x, top, x_of(layout, v.end) - x, band,
             kPalette[order[r].index % kPalette.size()], span_title(m, order[r], v));
        if (r + 1 < order.size()) {
          const auto &w = asn[order[r + 1]];
          if (w.start > v.end)
            os << "  <line class=\"gap\" x1=\"" << num(x_of(layout, v.end)) << "\" y1=\""
               << num(top + band / 2) << "\" x2=\"" << num(x_of(layout, w.start))
               << "\" y2=\"" << num(top + band / 2)
               << "\" stroke=\"#333333\" stroke-dasharray=\"2,2\"/>\n";
        }
      }
      break;
    }
    case PanelKind::CumulativeProfile: {
      Value peak = panel.capacity.value_or(0);
      std::vector<std::pair<Value, Value>> steps;
      for (Value t = layout.t0; t <= layout.t1; ++t) {
        const Value v = profile_at(*panel.cumul, asn, t);
        peak = std::max(peak, v);
        if (steps.empty() || steps.back().second != v)
          steps.emplace_back(t, v);
      }
      const double scale = peak > 0 ? band / static_cast<double>(peak) : 0.0;
      auto y_of = [&](Value v) { return top + band - scale * static_cast<double>(v); };
      os << "  <polyline fill=\"none\" stroke=\"#4e79a7\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto [t, v] = steps[i];
        if (i != 0)
          os << ' ' << num(x_of(layout, t)) << ',' << num(y_of(steps[i - 1].second)) << ' ';
        os << num(x_of(layout, t)) << ',' << num(y_of(v));
      }
      if (!steps.empty())
        os << ' ' << num(x_of(layout, layout.t1)) << ',' << num(y_of(steps.back().second));
      os << "\"/>\n";
      if (panel.capacity)
        os << "  <line class=\"capacity\" x1=\"100\" y1=\"" << num(y_of(*panel.capacity))
           << "\" x2=\"1000\" y2=\"" << num(y_of(*panel.capacity))
           << "\" stroke=\"#e15759\" stroke-dasharray=\"6,3\"/>\n";
      break;
    }
    }
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace cpsched::gantt
