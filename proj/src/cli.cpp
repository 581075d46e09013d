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

#include "cpsched/cli.hpp"

#include "cpsched/compiler.hpp"
#include "cpsched/error.hpp"
#include "cpsched/families.hpp"
#include "cpsched/gantt.hpp"
#include "cpsched/solver.hpp"
#include "cpsched/xcsp3.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cpsched::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string family;
  std::string input;
  std::string second_input;
  std::string out;
  std::string strategy = "auto";
  std::optional<std::uint64_t> budget_nodes;
  std::optional<std::int64_t> budget_ms;
  std::uint64_t seed = 0;
  bool timing = false;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw Error(ErrorCode::BadArgument, "cannot write " + path);
}

CompileOptions compile_options(const Options &o) {
  const auto s = parse_strategy(o.strategy);
  if (!s)
    throw UsageError("unknown strategy '" + o.strategy + "'");
  return CompileOptions{.strategy = *s};
}

solver::Budget budget(const Options &o) { return {o.budget_nodes, o.budget_ms}; }

families::Family family_arg(const std::string &name) {
  const auto f = families::parse_family(name);
  if (!f)
    throw UsageError("unknown family '" + name +
                     "' (expected jobshop, flowshop, rcpsp or flexible-jobshop)");
  return *f;
}

families::Instance instance_for(const Options &o) {
  const auto family = family_arg(o.family);
  auto inst = families::load_instance(o.input);
  if (inst.family != family)
    throw UsageError(o.input + " holds a " + std::string(families::to_string(inst.family)) +
                     " instance, not " + o.family);
  return inst;
}

bool looks_like_xml(const std::string &text) {
  const auto at = text.find_first_not_of(" \t\r\n");
  return at != std::string::npos && text[at] == '<';
}

int exit_code(flat::Status s) {
  switch (s) {
  case flat::Status::Optimum:
  case flat::Status::Sat: return kExitOk;
  case flat::Status::Unsat: return kExitUnsat;
  case flat::Status::Timeout: return kExitTimeout;
  }
  return kExitError;
}

double rounded_pct(std::size_t sched, std::size_t classical) {
  if (classical == 0)
    return 0.0;
  const double pct = (static_cast<double>(sched) - static_cast<double>(classical)) /
                     static_cast<double>(classical) * 100.0;
  return std::round(pct * 100.0) / 100.0;
}

json objective_json(const flat::Solution &sol) {
  return sol.objective ? json(*sol.objective) : json(nullptr);
}

struct Timed {
  flat::Solution solution;
  std::int64_t millis = 0;
};

Timed timed_solve(const flat::Model &m, const solver::Budget &b) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed r{solver::solve(m, b), 0};
  r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
  return r;
}

int cmd_build(const Options &o, std::ostream &out) {
  const auto inst = instance_for(o);
  const auto compiled = compile_model(families::build_model(inst), compile_options(o));
  write_file(o.out, xcsp3::emit(compiled.flat));
  json report;
  report["command"] = "build";
  report["family"] = families::to_string(inst.family);
  report["instance"] = inst.name;
  report["strategy"] = o.strategy;
  report["vars"] = compiled.flat.vars.size();
  report["constraints"] = compiled.flat.constraints.size();
  report["out"] = o.out;
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_solve(const Options &o, std::ostream &out) {
  const std::string text = read_file(o.input);
  flat::Model model;
  if (looks_like_xml(text)) {
    model = xcsp3::parse(text);
  } else {
    const auto inst = families::parse_instance(text);
    model = compile_model(families::build_model(inst), compile_options(o)).flat;
  }
  const auto run = timed_solve(model, budget(o));
  const auto &sol = run.solution;
  if (sol.has_assignment() && !flat::check(model, sol.assignment))
    throw Error(ErrorCode::BadArgument, "solver returned an assignment that fails check()");

  json report;
  report["command"] = "solve";
  report["input"] = o.input;
  report["status"] = flat::to_string(sol.status);
  report["objective"] = objective_json(sol);
  report["vars"] = model.vars.size();
  report["constraints"] = model.constraints.size();
  report["nodes"] = sol.nodes;
  if (o.timing)
    report["wall_ms"] = run.millis;

  if (!o.out.empty()) {
    json file;
    file["schema"] = 1;
    file["status"] = flat::to_string(sol.status);
    file["objective"] = objective_json(sol);
    json values = json::object();
    for (std::size_t i = 0; i < sol.assignment.size(); ++i)
      values[model.vars[i].name] = sol.assignment[i];
    file["values"] = std::move(values);
    write_file(o.out, file.dump(2) + "\n");
    report["solution"] = o.out;
  }
  out << report.dump(2) << '\n';
  return exit_code(sol.status);
}

json side_report(const flat::Model &m, const Timed &run, bool timing) {
  json r;
  r["status"] = flat::to_string(run.solution.status);
  r["objective"] = objective_json(run.solution);
  r["vars"] = m.vars.size();
  r["constraints"] = m.constraints.size();
  r["nodes"] = run.solution.nodes;
  if (timing)
    r["wall_ms"] = run.millis;
  return r;
}

int cmd_compare(const Options &o, std::ostream &out) {
  const auto inst = instance_for(o);
  const auto sched = compile_model(families::build_model(inst), compile_options(o)).flat;
  const auto classical = families::build_classical(inst);
  const auto a = timed_solve(sched, budget(o));
  const auto b = timed_solve(classical, budget(o));
  for (const auto &[m, run] : {std::pair{&sched, &a}, std::pair{&classical, &b}})
    if (run->solution.has_assignment() && !flat::check(*m, run->solution.assignment))
      throw Error(ErrorCode::BadArgument, "solver returned an assignment that fails check()");

  const auto sa = a.solution.status, sb = b.solution.status;
  const bool equal = (sa == flat::Status::Optimum && sb == flat::Status::Optimum &&
                      a.solution.objective == b.solution.objective) ||
                     (sa == flat::Status::Unsat && sb == flat::Status::Unsat);
  json report;
  report["command"] = "compare";
  report["family"] = families::to_string(inst.family);
  report["instance"] = inst.name;
  report["strategy"] = o.strategy;
  report["scheduling"] = side_report(sched, a, o.timing);
  report["classical"] = side_report(classical, b, o.timing);
  report["objectives_equal"] = equal;
  report["var_augmentation_pct"] = rounded_pct(sched.vars.size(), classical.vars.size());
  report["constraint_augmentation_pct"] =
      rounded_pct(sched.constraints.size(), classical.constraints.size());
  out << report.dump(2) << '\n';
  return std::max(exit_code(sa), exit_code(sb));
}

flat::Status status_from(const std::string &s) {
  for (auto st : {flat::Status::Optimum, flat::Status::Sat, flat::Status::Unsat,
                  flat::Status::Timeout})
    if (flat::to_string(st) == s)
      return st;
  throw Error(ErrorCode::ParseError, "unknown status '" + s + "'");
}

int cmd_render(const Options &o, std::ostream &out) {
  json sol;
  try {
    sol = json::parse(read_file(o.input));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseError, o.input + ": " + e.what());
  }
  if (!sol.is_object() || !sol.contains("status"))
    throw Error(ErrorCode::ParseError, o.input + ": not a solution file");
  const auto status = status_from(sol["status"].get<std::string>());
  const auto inst = families::load_instance(o.second_input);
  const Model model = families::build_model(inst);
  const auto compiled = compile_model(model, compile_options(o));

  Assignment asn;
  if (status == flat::Status::Optimum || status == flat::Status::Sat) {
    const auto &values = sol.at("values");
    std::vector<Value> flat_asn;
    for (const auto &v : compiled.flat.vars) {
      if (!values.contains(v.name))
        throw Error(ErrorCode::PartialAssignment,
                    "solution has no value for '" + v.name + "'");
      flat_asn.push_back(values[v.name].get<Value>());
    }
    if (!flat::check(compiled.flat, flat_asn))
      throw Error(ErrorCode::BadArgument, "solution violates the instance's model");
    asn = decode(compiled, flat_asn);
  }
  write_file(o.out, gantt::render(status, asn, model, gantt::default_timeline(model)));
  json report;
  report["command"] = "render";
  report["instance"] = inst.name;
  report["out"] = o.out;
  out << report.dump(2) << '\n';
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Scheduling models compiled to a flat CSP core"};
  app.name("cpsched");
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App *sub, bool with_budget) {
    sub->add_option("--strategy", o.strategy, "noOverlap lowering: auto, pairwise, unary-cumulative")
        ->check(CLI::IsMember({"auto", "pairwise", "unary-cumulative"}));
    if (with_budget) {
      sub->add_option("--budget-nodes", o.budget_nodes, "Search node limit");
      sub->add_option("--budget-ms", o.budget_ms, "Wall-clock limit in milliseconds");
      sub->add_option("--seed", o.seed, "Reserved; search is deterministic");
      sub->add_flag("--timing", o.timing, "Add wall_ms to the report");
    }
  };

  auto *build = app.add_subcommand("build", "Compile an instance and write XCSP3");
  build->add_option("family", o.family)->required();
  build->add_option("instance", o.input)->required();
  build->add_option("--out", o.out, "XCSP3 output path")->required();
  common(build, false);

  auto *solve = app.add_subcommand("solve", "Solve an XCSP3 file or an instance");
  solve->add_option("input", o.input)->required();
  solve->add_option("--out", o.out, "Write the solution as JSON");
  common(solve, true);

  auto *compare = app.add_subcommand("compare", "Solve the scheduling and classical formulations");
  compare->add_option("family", o.family)->required();
  compare->add_option("instance", o.input)->required();
  common(compare, true);

  auto *render = app.add_subcommand("render", "Draw a solution as an SVG Gantt chart");
  render->add_option("solution", o.input)->required();
  render->add_option("instance", o.second_input)->required();
  render->add_option("--out", o.out, "SVG output path")->required();
  common(render, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (build->parsed())
      return cmd_build(o, out);
    if (solve->parsed())
      return cmd_solve(o, out);
    if (compare->parsed())
      return cmd_compare(o, out);
    return cmd_render(o, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    json j;
    j["error"] = to_string(e.code());
    j["message"] = e.what();
    err << j.dump() << '\n';
    return kExitError;
  }
}

} // namespace cpsched::cli
