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

#include "cpsched/solver.hpp"

#include "cpsched/error.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>

namespace cpsched::solver {

using flat::VarIndex;

namespace {

constexpr Value kMaxDomainValues = 4'000'000;

class Search {
public:
  Search(const flat::Model &m, const Budget &budget) : m_(m), budget_(budget) {
    const std::size_t n = m.vars.size();
    doms_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (m.vars[v].domain.size() > kMaxDomainValues)
        throw Error(ErrorCode::SearchSpaceTooLarge, m.vars[v].name + ": domain too large");
      auto &d = doms_[v];
      d.vals = m.vars[v].domain.values();
      d.alive.assign(d.vals.size(), 1);
      d.count = d.vals.size();
      d.lo = 0;
      d.hi = d.vals.size() - 1;
    }
    watch_.resize(n);
    scopes_.resize(m.constraints.size());
    for (std::size_t c = 0; c < m.constraints.size(); ++c) {
      scopes_[c] = flat::scope(m.constraints[c]);
      for (auto v : scopes_[c])
        watch_[v].push_back(c);
    }
    in_queue_.assign(m.constraints.size(), 0);
    cur_.assign(n, 0);
    vb_.assign(n, IntDomain{});
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), VarIndex{0});
    std::stable_sort(order_.begin(), order_.end(), [&](VarIndex a, VarIndex b) {
      return doms_[a].count < doms_[b].count;
    });
  }

  flat::Solution run() {
    start_ = std::chrono::steady_clock::now();
    for (std::size_t c = 0; c < m_.constraints.size(); ++c)
      enqueue(c);
    dfs();
    flat::Solution sol;
    sol.nodes = nodes_;
    if (best_) {
      sol.assignment = *best_;
      if (m_.objective)
        sol.objective = (*best_)[m_.objective->var];
    }
    if (stopped_)
      sol.status = best_ ? flat::Status::Sat : flat::Status::Timeout;
    else if (!best_)
      sol.status = flat::Status::Unsat;
    else
      sol.status = m_.objective ? flat::Status::Optimum : flat::Status::Sat;
    if (!sol.has_assignment())
      sol.assignment.clear();
    return sol;
  }

private:
  struct Dom {
    std::vector<Value> vals;
    std::vector<char> alive;
    std::size_t count = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;
  };
  struct TrailEntry {
    VarIndex var;
    std::size_t k;
    std::size_t lo;
    std::size_t hi;
  };

  // --- domain store -------------------------------------------------------

  Value lb(VarIndex v) const { return doms_[v].vals[doms_[v].lo]; }
  Value ub(VarIndex v) const { return doms_[v].vals[doms_[v].hi]; }
  bool fixed(VarIndex v) const { return doms_[v].count == 1; }
  Value value(VarIndex v) const { return lb(v); }

  std::optional<std::size_t> slot(VarIndex v, Value x) const {
    const auto &d = doms_[v];
    auto it = std::lower_bound(d.vals.begin(), d.vals.end(), x);
    if (it == d.vals.end() || *it != x)
      return std::nullopt;
    return static_cast<std::size_t>(it - d.vals.begin());
  }
  bool contains(VarIndex v, Value x) const {
    const auto k = slot(v, x);
    return k && doms_[v].alive[*k];
  }

  /// Removes the k-th value of v. Returns false when v would become empty.
  bool remove_slot(VarIndex v, std::size_t k) {
    auto &d = doms_[v];
    if (!d.alive[k])
      return true;
    if (d.count == 1)
      return false;
    trail_.push_back({v, k, d.lo, d.hi});
    d.alive[k] = 0;
    --d.count;
    while (!d.alive[d.lo])
      ++d.lo;
    while (!d.alive[d.hi])
      --d.hi;
    for (auto c : watch_[v])
      enqueue(c);
    return true;
  }
  bool remove(VarIndex v, Value x) {
    const auto k = slot(v, x);
    return !k || remove_slot(v, *k);
  }
  bool remove_below(VarIndex v, Value x) {
    while (lb(v) < x)
      if (!remove_slot(v, doms_[v].lo))
        return false;
    return true;
  }
  bool remove_above(VarIndex v, Value x) {
    while (ub(v) > x)
      if (!remove_slot(v, doms_[v].hi))
        return false;
    return true;
  }
  bool assign(VarIndex v, Value x) {
    const auto &d = doms_[v];
    for (std::size_t k = 0; k < d.vals.size(); ++k)
      if (d.alive[k] && d.vals[k] != x && !remove_slot(v, k))
        return false;
    return true;
  }
  template <typename F> void for_each_value(VarIndex v, F f) const {
    const auto &d = doms_[v];
    for (std::size_t k = d.lo; k <= d.hi; ++k)
      if (d.alive[k])
        f(d.vals[k]);
  }
  std::vector<Value> values(VarIndex v) const {
    std::vector<Value> out;
    for_each_value(v, [&](Value x) { out.push_back(x); });
    return out;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const auto e = trail_.back();
      trail_.pop_back();
      auto &d = doms_[e.var];
      d.alive[e.k] = 1;
      ++d.count;
      d.lo = e.lo;
      d.hi = e.hi;
    }
  }

  // --- propagation --------------------------------------------------------

  void enqueue(std::size_t c) {
    if (!in_queue_[c]) {
      in_queue_[c] = 1;
      queue_.push_back(c);
    }
  }
  void clear_queue() {
    for (auto c : queue_)
      in_queue_[c] = 0;
    queue_.clear();
  }

  bool propagate() {
    while (!queue_.empty()) {
      const auto c = queue_.front();
      queue_.pop_front();
      in_queue_[c] = 0;
      if (!propagate_one(c)) {
        clear_queue();
        return false;
      }
    }
    return true;
  }

  bool propagate_one(std::size_t c) {
    const auto &con = m_.constraints[c];
    const auto &sc = scopes_[c];
    if (std::all_of(sc.begin(), sc.end(), [&](VarIndex v) { return fixed(v); })) {
      for (auto v : sc)
        cur_[v] = value(v);
      return flat::holds(con, cur_);
    }
    if (const auto *x = std::get_if<flat::Intension>(&con))
      return intension(x->expr, sc);
    if (const auto *x = std::get_if<flat::Extension>(&con))
      return extension(*x);
    if (const auto *x = std::get_if<flat::NoOverlap>(&con))
      return no_overlap(*x);
    if (const auto *x = std::get_if<flat::Cumulative>(&con))
      return cumulative(*x);
    return element(std::get<flat::Element>(con));
  }

  bool truthy(const flat::Expr &e) {
    try {
      return flat::evaluate(e, cur_) != 0;
    } catch (const flat::ZeroDivisor &) {
      return false;
    }
  }

  bool intension(const flat::Expr &e, const std::vector<VarIndex> &sc) {
    std::vector<VarIndex> open;
    for (auto v : sc) {
      if (fixed(v))
        cur_[v] = value(v);
      else
        open.push_back(v);
    }
    if (open.size() == 1) {
      const VarIndex v = open[0];
      for (Value x : values(v)) {
        cur_[v] = x;
        if (!truthy(e) && !remove(v, x))
          return false;
      }
      return true;
    }
    if (open.size() == 2 && doms_[open[0]].count * doms_[open[1]].count <= 40'000) {
      const VarIndex a = open[0], b = open[1];
      const auto va = values(a), vb = values(b);
      std::vector<char> sa(va.size(), 0), sb(vb.size(), 0);
      for (std::size_t i = 0; i < va.size(); ++i) {
        cur_[a] = va[i];
        for (std::size_t j = 0; j < vb.size(); ++j) {
          if (sa[i] && sb[j])
            continue;
          cur_[b] = vb[j];
          if (truthy(e)) {
            sa[i] = 1;
            sb[j] = 1;
          }
        }
      }
      for (std::size_t i = 0; i < va.size(); ++i)
        if (!sa[i] && !remove(a, va[i]))
          return false;
      for (std::size_t j = 0; j < vb.size(); ++j)
        if (!sb[j] && !remove(b, vb[j]))
          return false;
      return true;
    }
    // Bound shaving with interval arithmetic.
    for (auto v : sc)
      vb_[v] = {lb(v), ub(v)};
    if (flat::bounds(e, vb_).ub == 0)
      return false;
    for (auto v : open) {
      for (int side = 0; side < 2; ++side) {
        for (int step = 0; step < 16 && !fixed(v); ++step) {
          const Value x = side == 0 ? lb(v) : ub(v);
          vb_[v] = {x, x};
          const bool dead = flat::bounds(e, vb_).ub == 0;
          if (!dead)
            break;
          if (!remove(v, x))
            return false;
        }
        vb_[v] = {lb(v), ub(v)};
      }
    }
    return true;
  }

  bool extension(const flat::Extension &x) {
    const std::size_t arity = x.vars.size();
    if (!x.positive) {
      std::size_t open = arity;
      std::size_t n_open = 0;
      for (std::size_t i = 0; i < arity; ++i)
        if (!fixed(x.vars[i])) {
          open = i;
          ++n_open;
        }
      if (n_open != 1)
        return true;
      for (const auto &t : x.tuples) {
        bool match = true;
        for (std::size_t i = 0; i < arity && match; ++i)
          if (i != open)
            match = value(x.vars[i]) == t[i];
        if (match && !remove(x.vars[open], t[open]))
          return false;
      }
      return true;
    }
    std::vector<std::vector<char>> seen(arity);
    for (std::size_t i = 0; i < arity; ++i)
      seen[i].assign(doms_[x.vars[i]].vals.size(), 0);
    for (const auto &t : x.tuples) {
      bool live = true;
      for (std::size_t i = 0; i < arity && live; ++i)
        live = contains(x.vars[i], t[i]);
      if (!live)
        continue;
      for (std::size_t i = 0; i < arity; ++i)
        seen[i][*slot(x.vars[i], t[i])] = 1;
    }
    for (std::size_t i = 0; i < arity; ++i) {
      const auto &d = doms_[x.vars[i]];
      for (std::size_t k = 0; k < d.vals.size(); ++k)
        if (d.alive[k] && !seen[i][k] && !remove_slot(x.vars[i], k))
          return false;
    }
    return true;
  }

  Value len_lb(const flat::Operand &o) const { return o.var ? lb(*o.var) : o.constant; }

  bool no_overlap(const flat::NoOverlap &x) {
    const std::size_t n = x.origins.size();
    struct Part {
      Value a, b;
    };
    std::vector<std::optional<Part>> cp(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Value a = ub(x.origins[j]);
      const Value b = lb(x.origins[j]) + len_lb(x.lengths[j]);
      if (a < b)
        cp[j] = Part{a, b};
    }
    for (std::size_t i = 0; i < n; ++i) {
      const VarIndex s = x.origins[i];
      const Value len = len_lb(x.lengths[i]);
      for (Value v : values(s)) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !cp[j])
            continue;
          const bool clash = len >= 1 ? v < cp[j]->b && cp[j]->a < v + len
                                      : cp[j]->a < v && v < cp[j]->b;
          if (clash) {
            if (!remove(s, v))
              return false;
            break;
          }
        }
      }
    }
    return true;
  }

  bool cumulative(const flat::Cumulative &x) {
    const std::size_t n = x.origins.size();
    Value t0 = 0, t1 = -1;
    std::vector<Value> hl(n), ll(n);
    for (std::size_t j = 0; j < n; ++j) {
      hl[j] = len_lb(x.heights[j]);
      ll[j] = len_lb(x.lengths[j]);
      const Value a = lb(x.origins[j]);
      const Value b = ub(x.origins[j]) + ll[j];
      if (t1 < t0) {
        t0 = a;
        t1 = b;
      } else {
        t0 = std::min(t0, a);
        t1 = std::max(t1, b);
      }
    }
    if (t1 < t0)
      return true;
    std::vector<Value> profile(static_cast<std::size_t>(t1 - t0 + 1), 0);
    auto own = [&](std::size_t j, Value t) {
      return hl[j] > 0 && ub(x.origins[j]) <= t && t < lb(x.origins[j]) + ll[j] ? hl[j] : 0;
    };
    for (std::size_t j = 0; j < n; ++j) {
      if (hl[j] <= 0)
        continue;
      for (Value t = ub(x.origins[j]); t < lb(x.origins[j]) + ll[j]; ++t)
        profile[static_cast<std::size_t>(t - t0)] += hl[j];
    }
    for (Value load : profile)
      if (load > x.cap)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (hl[i] <= 0 || ll[i] <= 0)
        continue;
      const VarIndex s = x.origins[i];
      for (Value v : values(s)) {
        for (Value t = v; t < v + ll[i]; ++t) {
          const Value load = profile[static_cast<std::size_t>(t - t0)] - own(i, t);
          if (load + hl[i] > x.cap) {
            if (!remove(s, v))
              return false;
            break;
          }
        }
      }
    }
    return true;
  }

  bool element(const flat::Element &x) {
    const VarIndex out = x.value;
    std::vector<char> value_seen(doms_[out].vals.size(), 0);
    auto supported = [&](Value r, Value c) -> bool {
      if (r < 0 || static_cast<std::size_t>(r) >= x.table.size())
        return false;
      const auto &row = x.table[static_cast<std::size_t>(r)];
      if (c < 0 || static_cast<std::size_t>(c) >= row.size())
        return false;
      const auto k = slot(out, row[static_cast<std::size_t>(c)]);
      if (!k || !doms_[out].alive[*k])
        return false;
      value_seen[*k] = 1;
      return true;
    };
    if (!x.matrix) {
      const VarIndex i = x.index[0];
      for (Value c : values(i))
        if (!supported(0, c) && !remove(i, c))
          return false;
    } else {
      const VarIndex r = x.index[0], c = x.index[1];
      const auto rows = values(r), cols = values(c);
      std::vector<char> rs(rows.size(), 0), cs(cols.size(), 0);
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
          if (supported(rows[a], cols[b])) {
            rs[a] = 1;
            cs[b] = 1;
          }
      for (std::size_t a = 0; a < rows.size(); ++a)
        if (!rs[a] && !remove(r, rows[a]))
          return false;
      for (std::size_t b = 0; b < cols.size(); ++b)
        if (!cs[b] && !remove(c, cols[b]))
          return false;
    }
    const auto &d = doms_[out];
    for (std::size_t k = 0; k < d.vals.size(); ++k)
      if (d.alive[k] && !value_seen[k] && !remove_slot(out, k))
        return false;
    return true;
  }

  // --- search -------------------------------------------------------------

  bool out_of_budget() {
    if (budget_.max_nodes && nodes_ >= *budget_.max_nodes)
      return true;
    if (budget_.max_millis && (nodes_ & 127) == 0) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
      if (elapsed >= *budget_.max_millis)
        return true;
    }
    return false;
  }

  bool apply_bound() {
    if (!best_ || !m_.objective)
      return true;
    const VarIndex o = m_.objective->var;
    const Value incumbent = (*best_)[o];
    if (m_.objective->sense == flat::Sense::Minimize)
      return remove_above(o, incumbent - 1);
    return remove_below(o, incumbent + 1);
  }

  // Returns true when the search must stop.
  bool dfs() {
    if (out_of_budget()) {
      stopped_ = true;
      return true;
    }
    ++nodes_;
    if (!apply_bound() || !propagate()) {
      clear_queue();
      return false;
    }
    const auto it = std::find_if(order_.begin(), order_.end(),
                                 [&](VarIndex v) { return !fixed(v); });
    if (it == order_.end()) {
      std::vector<Value> asn(doms_.size());
      for (std::size_t v = 0; v < doms_.size(); ++v)
        asn[v] = value(v);
      if (!flat::check(m_, asn))
        throw Error(ErrorCode::BadArgument, "solver produced an invalid assignment");
      best_ = std::move(asn);
      return !m_.objective;
    }
    const VarIndex v = *it;
    for (Value x : values(v)) {
      if (!contains(v, x))
        continue; // pruned by a tighter bound found meanwhile
      const std::size_t mark = trail_.size();
      if (assign(v, x) && dfs())
        return true;
      clear_queue();
      undo_to(mark);
    }
    return false;
  }

  const flat::Model &m_;
  Budget budget_;
  std::vector<Dom> doms_;
  std::vector<std::vector<std::size_t>> watch_;
  std::vector<std::vector<VarIndex>> scopes_;
  std::vector<char> in_queue_;
  std::deque<std::size_t> queue_;
  std::vector<TrailEntry> trail_;
  std::vector<Value> cur_;
  std::vector<IntDomain> vb_;
  std::vector<VarIndex> order_;
  std::optional<std::vector<Value>> best_;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
  std::chrono::steady_clock::time_point start_;
};

} // namespace

flat::Solution solve(const flat::Model &m, const Budget &budget) {
  return Search(m, budget).run();
}

std::vector<std::vector<Value>> enumerate_all(const flat::Model &m, std::uint64_t cap) {
  std::uint64_t space = 1;
  for (const auto &v : m.vars) {
    const auto sz = static_cast<std::uint64_t>(v.domain.size());
    space = sz != 0 && space > cap / sz ? cap + 1 : space * sz;
    if (space > cap)
      throw Error(ErrorCode::SearchSpaceTooLarge,
                  "search space exceeds " + std::to_string(cap));
  }
  const std::size_t n = m.vars.size();
  // Each constraint is checked once its highest-numbered variable is set.
  std::vector<std::vector<std::size_t>> due(n + 1);
  for (std::size_t c = 0; c < m.constraints.size(); ++c) {
    const auto sc = flat::scope(m.constraints[c]);
    const std::size_t last = sc.empty() ? n : *std::max_element(sc.begin(), sc.end());
    due[last].push_back(c);
  }
  std::vector<Value> asn(n, 0);
  std::vector<std::vector<Value>> out;
  for (auto c : due[n])
    if (!flat::holds(m.constraints[c], asn))
      return out;
  std::vector<std::vector<Value>> values(n);
  for (std::size_t v = 0; v < n; ++v)
    values[v] = m.vars[v].domain.values();
  auto rec = [&](auto &&self, std::size_t k) -> void {
    if (k == n) {
      out.push_back(asn);
      return;
    }
    for (Value x : values[k]) {
      asn[k] = x;
      const bool ok = std::all_of(due[k].begin(), due[k].end(), [&](std::size_t c) {
        return flat::holds(m.constraints[c], asn);
      });
      if (ok)
        self(self, k + 1);
    }
  };
  rec(rec, 0);
  return out;
}

} // namespace cpsched::solver
