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
#include "cpsched/families.hpp"
#include "cpsched/solver.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cpsched;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "cpsched_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t occurrences(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1))
    ++n;
  return n;
}

ErrorCode parse_code(const std::string &text) {
  try {
    families::parse_instance(text);
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::BadArgument;
}

} // namespace

TEST_SUITE("families") {

TEST_CASE("instance validation") {
  CHECK(parse_code("{oops") == ErrorCode::ParseError);
  CHECK(parse_code("[]") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 2, "family": "rcpsp"})") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "openshop"})") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "jobshop", "durations": [[1, 2], [3]], "machines": [[0, 1], [1]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "jobshop", "durations": [[1, -2]], "machines": [[0, 1]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "jobshop", "durations": [[1, 2]], "machines": [[0, 2]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "rcpsp", "durations": [1], "capacities": [-1], "requests": [[0]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "rcpsp", "durations": [1], "capacities": [1], "requests": [[0]], "precedences": [[0, 3]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "flexible-jobshop", "durations": [[-1, -1]]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"schema": 1, "family": "flexible-jobshop", "durations": [[1, 2]], "types": [0], "setups": [[[0]]]})") ==
        ErrorCode::ParseError);
}

TEST_CASE("flow shop uses the machine order of every job") {
  const auto inst = families::parse_instance(R"({"schema": 1, "family": "flowshop", "durations": [[1, 2, 3], [2, 2, 2]]})");
  CHECK(inst.shop.machines == Matrix{{0, 1, 2}, {0, 1, 2}});
  CHECK(inst.name == "flowshop");
}

TEST_CASE("scheduling formulations") {
  const auto shop = families::load_instance("data/instances/jobshop_2x2.json");
  const auto m = families::build_model(shop);
  CHECK(m.intervals().size() == 4);
  CHECK(m.sequences().size() == 2);
  CHECK(m.interval(IntervalId{0}).id == "op_0_0");
  CHECK(m.objective());

  const auto rc = families::load_instance("data/instances/rcpsp_toy.json");
  const auto r = families::build_model(rc);
  CHECK(r.intervals().size() == 4);
  CHECK(r.constraints().size() == 3); // two precedences, one resource

  const auto fx = families::load_instance("data/instances/fjs_4x2_setups.json");
  const auto f = families::build_model(fx);
  CHECK(f.intervals().size() == 4 + 6); // operations plus eligible modes
  CHECK(f.sequences().size() == 2);
}

TEST_CASE("classical formulations reach the same optimum") {
  for (const auto &entry : fs::directory_iterator("data/instances")) {
    CAPTURE(entry.path().string());
    const auto inst = families::load_instance(entry.path().string());
    const auto sched = solver::solve(compile_model(families::build_model(inst)).flat);
    const auto classical = solver::solve(families::build_classical(inst));
    REQUIRE(sched.status == flat::Status::Optimum);
    REQUIRE(classical.status == flat::Status::Optimum);
    CHECK(*sched.objective == *classical.objective);
  }
}

}

TEST_SUITE("cli") {

TEST_CASE("build writes one noOverlap per machine") {
  const auto out = scratch() / "js.xml";
  const auto r = run({"build", "jobshop", "data/instances/jobshop_2x2.json", "--out", out.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(occurrences(slurp(out), "<noOverlap>") == 2);
  const auto report = nlohmann::json::parse(r.out);
  CHECK(report["vars"].get<std::size_t>() > 0);
  CHECK(report["constraints"].get<std::size_t>() > 0);
}

TEST_CASE("build writes one cumulative for the project toy") {
  const auto out = scratch() / "rc.xml";
  REQUIRE(run({"build", "rcpsp", "data/instances/rcpsp_toy.json", "--out", out.string()}).code == 0);
  CHECK(occurrences(slurp(out), "<cumulative>") == 1);
}

TEST_CASE("malformed instance") {
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << "{\"schema\": 1, \"family\": ";
  const auto r = run({"build", "rcpsp", bad.string(), "--out", (scratch() / "x.xml").string()});
  CHECK(r.code == cli::kExitError);
  CHECK(r.err.find("ParseError") != std::string::npos);
}

TEST_CASE("solve exit codes") {
  const auto unsat = run({"solve", "data/unsat/rcpsp_overload.json"});
  CHECK(unsat.code == cli::kExitUnsat);
  CHECK(nlohmann::json::parse(unsat.out)["status"] == "UNSAT");

  const auto opt = run({"solve", "data/instances/jobshop_2x2.json"});
  CHECK(opt.code == cli::kExitOk);
  const auto report = nlohmann::json::parse(opt.out);
  CHECK(report["status"] == "OPTIMUM");
  CHECK(report["objective"] == 5);
  CHECK_FALSE(report.contains("wall_ms"));

  const auto timeout = run({"solve", "data/instances/jobshop_2x2.json", "--budget-nodes", "0"});
  CHECK(timeout.code == cli::kExitTimeout);
  CHECK(nlohmann::json::parse(timeout.out)["status"] == "TIMEOUT");

  const auto timed = run({"solve", "data/instances/jobshop_2x2.json", "--timing", "--seed", "7"});
  CHECK(nlohmann::json::parse(timed.out).contains("wall_ms"));
}

TEST_CASE("solve reads emitted documents") {
  const auto xml = scratch() / "js2.xml";
  REQUIRE(run({"build", "jobshop", "data/instances/jobshop_2x2.json", "--out", xml.string()}).code == 0);
  const auto r = run({"solve", xml.string()});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["objective"] == 5);

  const auto broken = scratch() / "broken.xml";
  std::ofstream(broken) << "<instance><variables><var id=\"x\"> 0..3 </var></variables>"
                           "<constraints><intension> eq(y,1) </intension></constraints></instance>";
  const auto e = run({"solve", broken.string()});
  CHECK(e.code == cli::kExitError);
  CHECK(e.err.find("MalformedDocument") != std::string::npos);
}

TEST_CASE("compare reports equality and augmentation") {
  const auto r = run({"compare", "rcpsp", "data/instances/rcpsp_toy.json"});
  REQUIRE(r.code == 0);
  const auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["objectives_equal"] == true);
  CHECK(rep["scheduling"]["objective"] == rep["classical"]["objective"]);

  const auto js = nlohmann::json::parse(run({"compare", "jobshop", "data/instances/jobshop_2x2.json"}).out);
  CHECK(js["objectives_equal"] == true);
  const double sv = js["scheduling"]["vars"].get<double>();
  const double cv = js["classical"]["vars"].get<double>();
  CHECK(js["var_augmentation_pct"].get<double>() ==
        doctest::Approx(std::round((sv - cv) / cv * 10000.0) / 100.0));
}

TEST_CASE("usage errors") {
  CHECK(run({"compare", "openshop", "data/instances/jobshop_2x2.json"}).code == cli::kExitUsage);
  CHECK(run({"compare", "rcpsp", "data/instances/jobshop_2x2.json"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"solve"}).code == cli::kExitUsage);
  CHECK(run({"solve", "x.json", "--strategy", "theta"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
}

TEST_CASE("render from a solution file") {
  const auto sol = scratch() / "sol.json";
  const auto svg = scratch() / "out.svg";
  REQUIRE(run({"solve", "data/instances/rcpsp_toy.json", "--out", sol.string()}).code == 0);
  REQUIRE(run({"render", sol.string(), "data/instances/rcpsp_toy.json", "--out", svg.string()}).code == 0);
  const auto first = slurp(svg);
  CHECK(first.find("<svg") != std::string::npos);
  REQUIRE(run({"render", sol.string(), "data/instances/rcpsp_toy.json", "--out", svg.string()}).code == 0);
  CHECK(slurp(svg) == first);

  const auto none = scratch() / "none.json";
  REQUIRE(run({"solve", "data/unsat/rcpsp_overload.json", "--out", none.string()}).code == 20);
  const auto r = run({"render", none.string(), "data/unsat/rcpsp_overload.json", "--out", svg.string()});
  CHECK(r.code == cli::kExitError);
  CHECK(r.err.find("NoSolution") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  const auto a = run({"compare", "flexible-jobshop", "data/instances/fjs_4x2_setups.json"});
  const auto b = run({"compare", "flexible-jobshop", "data/instances/fjs_4x2_setups.json"});
  CHECK(a.out == b.out);
}

}
