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

#include "cpsched/families.hpp"

#include "cpsched/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cpsched::families {

using flat::Expr;
using flat::Op;
using json = nlohmann::json;

std::string_view to_string(Family f) {
  switch (f) {
  case Family::JobShop: return "jobshop";
  case Family::FlowShop: return "flowshop";
  case Family::Rcpsp: return "rcpsp";
  case Family::FlexibleJobShop: return "flexible-jobshop";
  }
  return "";
}

std::optional<Family> parse_family(std::string_view s) {
  for (auto f : {Family::JobShop, Family::FlowShop, Family::Rcpsp, Family::FlexibleJobShop})
    if (to_string(f) == s)
      return f;
  return std::nullopt;
}

namespace {

[[noreturn]] void bad(const std::string &what) { throw Error(ErrorCode::ParseError, what); }

Matrix matrix(const json &j, const char *key, bool rectangular = true) {
  if (!j.contains(key) || !j[key].is_array())
    bad(std::string("missing array '") + key + "'");
  Matrix out;
  try {
    out = j[key].get<Matrix>();
  } catch (const json::exception &) {
    bad(std::string("'") + key + "' must be an array of integer arrays");
  }
  if (rectangular)
    for (const auto &row : out)
      if (row.size() != out.front().size())
        bad(std::string("'") + key + "' is not rectangular");
  return out;
}

std::vector<Value> vec(const json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_array())
    bad(std::string("missing array '") + key + "'");
  try {
    return j[key].get<std::vector<Value>>();
  } catch (const json::exception &) {
    bad(std::string("'") + key + "' must be an array of integers");
  }
}

std::vector<std::pair<Value, Value>> pairs(const json &j, const char *key, std::size_t n) {
  std::vector<std::pair<Value, Value>> out;
  if (!j.contains(key))
    return out;
  for (const auto &row : matrix(j, key, false)) {
    if (row.size() != 2)
      bad(std::string("'") + key + "' entries must be pairs");
    for (Value v : row)
      if (v < 0 || v >= static_cast<Value>(n))
        bad(std::string("'") + key + "' refers to an unknown task");
    out.emplace_back(row[0], row[1]);
  }
  return out;
}

void non_negative(const Matrix &m, const char *what) {
  for (const auto &row : m)
    for (Value v : row)
      if (v < 0)
        bad(std::string(what) + " must be >= 0");
}

Value sum_of(const Matrix &m) {
  Value s = 0;
  for (const auto &row : m)
    for (Value v : row)
      s += std::max<Value>(v, 0);
  return s;
}

std::string op_id(std::size_t j, std::size_t k) {
  return "op_" + std::to_string(j) + "_" + std::to_string(k);
}

} // namespace

Instance parse_instance(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object())
    bad("instance must be a JSON object");
  if (j.value("schema", 0) != 1)
    bad("unsupported schema (expected 1)");
  Instance inst;
  const auto family = parse_family(j.value("family", std::string()));
  if (!family)
    bad("unknown family '" + j.value("family", std::string()) + "'");
  inst.family = *family;
  inst.name = j.value("name", std::string(to_string(*family)));

  switch (inst.family) {
  case Family::JobShop:
  case Family::FlowShop: {
    inst.shop.durations = matrix(j, "durations");
    non_negative(inst.shop.durations, "durations");
    const std::size_t machines =
        inst.shop.durations.empty() ? 0 : inst.shop.durations.front().size();
    if (inst.family == Family::FlowShop) {
      for (std::size_t r = 0; r < inst.shop.durations.size(); ++r) {
        inst.shop.machines.emplace_back(machines);
        std::iota(inst.shop.machines.back().begin(), inst.shop.machines.back().end(), 0);
      }
    } else {
      inst.shop.machines = matrix(j, "machines");
      if (inst.shop.machines.size() != inst.shop.durations.size() ||
          (!inst.shop.machines.empty() && inst.shop.machines.front().size() != machines))
        bad("'machines' and 'durations' differ in shape");
      for (const auto &row : inst.shop.machines)
        for (Value m : row)
          if (m < 0 || m >= static_cast<Value>(machines))
            bad("machine index out of range");
    }
    break;
  }
  case Family::Rcpsp: {
    auto &d = inst.rcpsp;
    d.durations = vec(j, "durations");
    d.capacities = vec(j, "capacities");
    d.requests = matrix(j, "requests");
    non_negative({d.durations}, "durations");
    non_negative({d.capacities}, "capacities");
    non_negative(d.requests, "requests");
    if (d.requests.size() != d.durations.size() ||
        (!d.requests.empty() && d.requests.front().size() != d.capacities.size()))
      bad("'requests' must be tasks x resources");
    d.precedences = pairs(j, "precedences", d.durations.size());
    break;
  }
  case Family::FlexibleJobShop: {
    auto &d = inst.flex;
    d.durations = matrix(j, "durations");
    for (const auto &row : d.durations) {
      for (Value v : row)
        if (v < -1)
          bad("durations must be >= 0, or -1 for an ineligible machine");
      if (std::none_of(row.begin(), row.end(), [](Value v) { return v >= 0; }))
        bad("an operation has no eligible machine");
    }
    d.precedences = pairs(j, "precedences", d.durations.size());
    d.types = j.contains("types") ? vec(j, "types") : std::vector<Value>(d.durations.size(), 0);
    if (d.types.size() != d.durations.size())
      bad("'types' must have one entry per operation");
    const Value max_type = d.types.empty() ? 0 : *std::max_element(d.types.begin(), d.types.end());
    if (std::any_of(d.types.begin(), d.types.end(), [](Value t) { return t < 0; }))
      bad("types must be >= 0");
    if (j.contains("setups")) {
      if (!j["setups"].is_array())
        bad("'setups' must be an array of matrices");
      const std::size_t machines = d.durations.empty() ? 0 : d.durations.front().size();
      for (const auto &m : j["setups"]) {
        json holder = {{"m", m}};
        d.setups.push_back(matrix(holder, "m"));
        non_negative(d.setups.back(), "setups");
        if (static_cast<Value>(d.setups.back().size()) <= max_type ||
            d.setups.back().size() != d.setups.back().front().size())
          bad("setup matrices must be square and cover every type");
      }
      if (d.setups.size() != machines)
        bad("one setup matrix per machine expected");
    }
    break;
  }
  }
  return inst;
}

Instance load_instance(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    bad("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

// --- scheduling formulations ---------------------------------------------------

namespace {

Model shop_model(const ShopData &d) {
  Model m;
  const Value horizon = sum_of(d.durations);
  const std::size_t machines = d.durations.empty() ? 0 : d.durations.front().size();
  std::vector<std::vector<IntervalId>> ops(d.durations.size());
  std::vector<std::vector<IntervalId>> on(machines);
  std::vector<IntervalId> last;
  for (std::size_t j = 0; j < d.durations.size(); ++j) {
    for (std::size_t k = 0; k < d.durations[j].size(); ++k) {
      const auto x = m.new_interval(
          {.id = op_id(j, k), .start = {0, horizon}, .size = IntDomain{d.durations[j][k]}});
      ops[j].push_back(x);
      on[static_cast<std::size_t>(d.machines[j][k])].push_back(x);
      if (k > 0)
        end_before_start(m, ops[j][k - 1], x);
    }
    if (!ops[j].empty())
      last.push_back(ops[j].back());
  }
  for (std::size_t k = 0; k < machines; ++k)
    if (!on[k].empty())
      post_seq_no_overlap(m, m.new_sequence("machine_" + std::to_string(k), on[k]));
  if (!last.empty())
    m.minimize(makespan(last));
  return m;
}

Model rcpsp_model(const RcpspData &d) {
  Model m;
  const Value horizon = std::accumulate(d.durations.begin(), d.durations.end(), Value{0});
  std::vector<IntervalId> x;
  for (std::size_t i = 0; i < d.durations.size(); ++i)
    x.push_back(m.new_interval({.id = "task_" + std::to_string(i),
                                .start = {0, horizon},
                                .size = IntDomain{d.durations[i]}}));
  for (const auto &[a, b] : d.precedences)
    end_before_start(m, x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
  for (std::size_t k = 0; k < d.capacities.size(); ++k) {
    CumulExpr usage;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (d.requests[i][k] > 0)
        usage += pulse(x[i], d.requests[i][k]);
    if (!usage.empty())
      post_cumul_le(m, usage, d.capacities[k]);
  }
  if (!x.empty())
    m.minimize(makespan(x));
  return m;
}

Value max_setup(const FlexData &d) {
  Value s = 0;
  for (const auto &mat : d.setups)
    for (const auto &row : mat)
      for (Value v : row)
        s = std::max(s, v);
  return s;
}

Value flex_horizon(const FlexData &d) {
  Value h = 0;
  for (const auto &row : d.durations)
    h += *std::max_element(row.begin(), row.end());
  return h + max_setup(d) * static_cast<Value>(d.durations.size());
}

Model flex_model(const FlexData &d) {
  Model m;
  const Value horizon = flex_horizon(d);
  const std::size_t machines = d.durations.empty() ? 0 : d.durations.front().size();
  std::vector<IntervalId> op;
  std::vector<std::vector<IntervalId>> on(machines);
  std::vector<std::vector<Value>> on_types(machines);
  for (std::size_t i = 0; i < d.durations.size(); ++i) {
    std::vector<IntervalId> modes;
    Value lo = horizon, hi = 0;
    for (std::size_t k = 0; k < machines; ++k) {
      const Value dur = d.durations[i][k];
      if (dur < 0)
        continue;
      lo = std::min(lo, dur);
      hi = std::max(hi, dur);
      const auto x = m.new_interval({.id = "mode_" + std::to_string(i) + "_" + std::to_string(k),
                                     .start = {0, horizon},
                                     .size = IntDomain{dur},
                                     .optional = true});
      modes.push_back(x);
      on[k].push_back(x);
      on_types[k].push_back(d.types[i]);
    }
    op.push_back(m.new_interval(
        {.id = "op_" + std::to_string(i), .start = {0, horizon}, .size = IntDomain{lo, hi}}));
    post_alternative(m, op.back(), modes);
  }
  for (std::size_t k = 0; k < machines; ++k) {
    if (on[k].empty())
      continue;
    const auto seq = m.new_sequence("machine_" + std::to_string(k), on[k], on_types[k]);
    if (d.setups.empty())
      post_seq_no_overlap(m, seq);
    else
      post_seq_no_overlap(m, seq, d.setups[k]);
  }
  for (const auto &[a, b] : d.precedences)
    end_before_start(m, op[static_cast<std::size_t>(a)], op[static_cast<std::size_t>(b)]);
  if (!op.empty())
    m.minimize(makespan(op));
  return m;
}

} // namespace

Model build_model(const Instance &inst) {
  switch (inst.family) {
  case Family::JobShop:
  case Family::FlowShop: return shop_model(inst.shop);
  case Family::Rcpsp: return rcpsp_model(inst.rcpsp);
  case Family::FlexibleJobShop: return flex_model(inst.flex);
  }
  return {};
}

// --- classical formulations ------------------------------------------------------

namespace {

void minimize_max(flat::Model &f, std::vector<Expr> ends, Value horizon) {
  const Expr top = ends.size() == 1 ? ends[0] : flat::make(Op::Max, std::move(ends));
  const auto mk = f.add_var("makespan", IntDomain{0, horizon});
  f.post(flat::Intension{flat::eq(flat::var(mk), top)});
  f.objective = flat::Objective{flat::Sense::Minimize, mk};
}

flat::Model shop_classical(const ShopData &d) {
  flat::Model f;
  const Value horizon = sum_of(d.durations);
  const std::size_t machines = d.durations.empty() ? 0 : d.durations.front().size();
  std::vector<flat::NoOverlap> per(machines);
  std::vector<Expr> ends;
  for (std::size_t j = 0; j < d.durations.size(); ++j) {
    std::optional<flat::VarIndex> prev;
    for (std::size_t k = 0; k < d.durations[j].size(); ++k) {
      const Value dur = d.durations[j][k];
      const auto s = f.add_var("s_" + std::to_string(j) + "_" + std::to_string(k),
                               IntDomain{0, horizon - dur});
      if (prev)
        f.post(flat::Intension{flat::le(
            flat::add(flat::var(*prev), d.durations[j][k - 1]), flat::var(s))});
      auto &no = per[static_cast<std::size_t>(d.machines[j][k])];
      no.origins.push_back(s);
      no.lengths.push_back(flat::Operand::of_const(dur));
      prev = s;
    }
    if (prev)
      ends.push_back(flat::add(flat::var(*prev), d.durations[j].back()));
  }
  for (auto &no : per)
    if (!no.origins.empty())
      f.post(std::move(no));
  if (!ends.empty())
    minimize_max(f, std::move(ends), horizon);
  return f;
}

flat::Model rcpsp_classical(const RcpspData &d) {
  flat::Model f;
  const Value horizon = std::accumulate(d.durations.begin(), d.durations.end(), Value{0});
  std::vector<flat::VarIndex> s;
  for (std::size_t i = 0; i < d.durations.size(); ++i)
    s.push_back(f.add_var("s_" + std::to_string(i), IntDomain{0, horizon - d.durations[i]}));
  for (const auto &[a, b] : d.precedences) {
    const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
    f.post(flat::Intension{flat::le(flat::add(flat::var(s[ia]), d.durations[ia]),
                                    flat::var(s[ib]))});
  }
  for (std::size_t k = 0; k < d.capacities.size(); ++k) {
    flat::Cumulative c;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (d.requests[i][k] <= 0 || d.durations[i] == 0)
        continue;
      c.origins.push_back(s[i]);
      c.lengths.push_back(flat::Operand::of_const(d.durations[i]));
      c.heights.push_back(flat::Operand::of_const(d.requests[i][k]));
    }
    c.cap = d.capacities[k];
    if (!c.origins.empty())
      f.post(std::move(c));
  }
  std::vector<Expr> ends;
  for (std::size_t i = 0; i < s.size(); ++i)
    ends.push_back(flat::add(flat::var(s[i]), d.durations[i]));
  if (!ends.empty())
    minimize_max(f, std::move(ends), horizon);
  return f;
}

flat::Model flex_classical(const FlexData &d) {
  flat::Model f;
  const Value horizon = flex_horizon(d);
  const std::size_t ops = d.durations.size();
  const std::size_t machines = ops == 0 ? 0 : d.durations.front().size();
  std::vector<flat::VarIndex> s(ops);
  std::vector<std::vector<std::optional<flat::VarIndex>>> b(
      ops, std::vector<std::optional<flat::VarIndex>>(machines));
  std::vector<Expr> dur;
  for (std::size_t i = 0; i < ops; ++i) {
    s[i] = f.add_var("s_" + std::to_string(i), IntDomain{0, horizon});
    std::vector<Expr> chosen, terms;
    for (std::size_t k = 0; k < machines; ++k) {
      if (d.durations[i][k] < 0)
        continue;
      b[i][k] = f.add_var("b_" + std::to_string(i) + "_" + std::to_string(k),
                          IntDomain{0, 1}, true);
      chosen.push_back(flat::var(*b[i][k]));
      terms.push_back(flat::mul(flat::var(*b[i][k]), d.durations[i][k]));
    }
    f.post(flat::Intension{flat::eq(flat::make(Op::Add, chosen), 1)});
    dur.push_back(flat::make(Op::Add, terms));
    f.post(flat::Intension{flat::le(flat::add(flat::var(s[i]), dur[i]), horizon)});
  }
  for (const auto &[a, c] : d.precedences) {
    const auto ia = static_cast<std::size_t>(a), ic = static_cast<std::size_t>(c);
    f.post(flat::Intension{flat::le(flat::add(flat::var(s[ia]), dur[ia]), flat::var(s[ic]))});
  }
  for (std::size_t k = 0; k < machines; ++k)
    for (std::size_t i = 0; i < ops; ++i)
      for (std::size_t j = i + 1; j < ops; ++j) {
        if (!b[i][k] || !b[j][k])
          continue;
        const auto ti = static_cast<std::size_t>(d.types[i]);
        const auto tj = static_cast<std::size_t>(d.types[j]);
        const Value sij = d.setups.empty() ? 0 : d.setups[k][ti][tj];
        const Value sji = d.setups.empty() ? 0 : d.setups[k][tj][ti];
        const Expr i_first = flat::le(
            flat::add(flat::var(s[i]), d.durations[i][k] + sij), flat::var(s[j]));
        const Expr j_first = flat::le(
            flat::add(flat::var(s[j]), d.durations[j][k] + sji), flat::var(s[i]));
        f.post(flat::Intension{flat::make(Op::Or, {flat::eq(flat::var(*b[i][k]), 0),
                                                   flat::eq(flat::var(*b[j][k]), 0),
                                                   i_first, j_first})});
      }
  std::vector<Expr> ends;
  for (std::size_t i = 0; i < ops; ++i)
    ends.push_back(flat::add(flat::var(s[i]), dur[i]));
  if (!ends.empty())
    minimize_max(f, std::move(ends), horizon);
  return f;
}

} // namespace

flat::Model build_classical(const Instance &inst) {
  switch (inst.family) {
  case Family::JobShop:
  case Family::FlowShop: return shop_classical(inst.shop);
  case Family::Rcpsp: return rcpsp_classical(inst.rcpsp);
  case Family::FlexibleJobShop: return flex_classical(inst.flex);
  }
  return {};
}

} // namespace cpsched::families
