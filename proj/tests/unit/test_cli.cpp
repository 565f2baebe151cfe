#include <doctest.h>

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "case_study.hpp"
#include "skillroute/cli.hpp"
#include "skillroute/json_io.hpp"

using namespace skillroute;
using namespace testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "skillroute");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& tag) {
  static int counter = 0;
  auto dir = fs::temp_directory_path() / fmt::format("skillroute-cli-{}-{}-{}", ::getpid(), tag, counter++);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> case_args(const std::string& command, const fs::path& out) {
  return {command,
          "--models", case_file("models_trace.json").string(),
          "--profiles", case_file("profiles.json").string(),
          "--workflow", case_file("workflow.json").string(),
          "--out", out.string()};
}

std::map<std::string, std::string> winners(const fs::path& result_file) {
  std::map<std::string, std::string> out;
  const Json doc = read_json_file(result_file);
  for (const auto& d : doc["decisions"]) out[d["task"]] = d["winner"];
  return out;
}

}  // namespace

TEST_CASE("objective route on the case study") {
  const auto dir = scratch("route");
  auto args = case_args("route", dir);
  args.insert(args.end(), {"--cost-sensitivity", "0.5"});
  const auto r = cli(args);
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto w = winners(dir / "routing_result.json");
  CHECK(w.at(kTC) == kMistral);
  CHECK(w.at(kTD) == kGemini);
  CHECK(w.at(kES) == kMistral);
  CHECK(w.at(kKB) == kGemini);
  CHECK(r.out.find("total cost $36.04") != std::string::npos);
  CHECK(fs::exists(dir / "explanation_log.json"));
  fs::remove_all(dir);
}

TEST_CASE("budget route and infeasible budgets") {
  const auto dir = scratch("budget");
  auto args = case_args("route", dir);
  auto ok = args;
  ok.insert(ok.end(), {"--budget", "100"});
  REQUIRE(cli(ok).code == 0);
  const auto w = winners(dir / "routing_result.json");
  CHECK(w.at(kTD) == kClaude);
  CHECK(w.at(kRC) == kGemini);
  CHECK(w.at(kTC) == kMistral);

  auto poor = args;
  poor.insert(poor.end(), {"--budget", "0.5"});
  const auto r = cli(poor);
  CHECK(r.code == 3);
  CHECK(r.err.find("cheapest plan") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("quality override by initials") {
  const auto dir = scratch("override");
  auto args = case_args("route", dir);
  args.insert(args.end(), {"--cost-sensitivity", "0.5", "--override-quality", "ES=0.9"});
  REQUIRE(cli(args).code == 0);
  const auto doc = read_json_file(dir / "explanation_log.json");
  bool found = false;
  for (const auto& t : doc["workflow"]["subtasks"]) {
    if (t["name"] != kES) continue;
    found = true;
    CHECK(t["quality"]["override"] == 0.9);
    CHECK(t["quality"]["effective"] == 0.9);
  }
  CHECK(found);
  const auto w = winners(dir / "routing_result.json");
  CHECK(w.at(kTD) == kGemini);
  CHECK(w.at(kTC) == kMistral);

  auto bad = case_args("route", dir);
  bad.insert(bad.end(), {"--cost-sensitivity", "0.5", "--override-quality", "XX=0.9"});
  CHECK(cli(bad).code == 2);
  bad.back() = "ES=1.2";
  CHECK(cli(bad).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("sweeps") {
  const auto dir = scratch("sweep");
  auto cost = case_args("sweep", dir);
  cost.insert(cost.end(), {"--sweep-cost", "0,0.05,0.5,0.95,1"});
  const auto r = cli(cost);
  REQUIRE(r.code == 0);
  const auto doc = read_json_file(dir / "sweep.json");
  CHECK(doc["steps"].size() == 5);
  CHECK(r.out.find("changed:") != std::string::npos);

  auto budget = case_args("sweep", dir);
  budget.insert(budget.end(), {"--sweep-budget", "5,50,100"});
  REQUIRE(cli(budget).code == 0);
  CHECK(read_json_file(dir / "sweep.json")["steps"].size() == 3);

  auto neither = case_args("sweep", dir);
  CHECK(cli(neither).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("offline runs are byte-identical") {
  std::vector<std::string> contents;
  for (int i = 0; i < 2; ++i) {
    const auto dir = scratch("determinism");
    auto args = case_args("route", dir);
    args.insert(args.end(), {"--cost-sensitivity", "1.0", "--explain", "--fixtures", case_file("llm").string()});
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    contents.push_back(slurp(dir / "routing_result.json") + slurp(dir / "explanation_log.json") +
                       slurp(dir / "explanations.txt"));
    fs::remove_all(dir);
  }
  CHECK(contents[0] == contents[1]);
}

TEST_CASE("dry-run explanations need no client") {
  const auto dir = scratch("dry");
  auto args = case_args("route", dir);
  args.insert(args.end(), {"--budget", "50", "--dry-run-explain"});
  REQUIRE(cli(args).code == 0);
  const auto text = slurp(dir / "explanations.txt");
  CHECK(text.find("Do not mention the formulas, variables, or raw numbers") != std::string::npos);

  auto live = case_args("route", dir);
  live.insert(live.end(), {"--budget", "50", "--explain"});
  ::unsetenv("PROFILER_ENDPOINT");
  CHECK(cli(live).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("profile command") {
  const auto dir = scratch("profile");
  SUBCASE("fixtures fill benchmarks and workflow") {
    const auto r = cli({"profile", "--benchmarks", case_file("benchmarks_unprofiled.json").string(), "--profiles",
                        case_file("profiles.json").string(), "--workflow",
                        case_file("workflow_unprofiled.json").string(), "--fixtures", case_file("llm").string(),
                        "--kappa", "0.3", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("capability profiles taken from") != std::string::npos);
    CHECK(read_json_file(dir / "profiles.json")["kappa"] == 0.3);
    CHECK(canonical_dump(read_json_file(dir / "workflow.json")) ==
          canonical_dump(read_json_file(case_file("workflow.json"))));
    CHECK(fs::exists(dir / "profiler_trace.json"));
  }
  SUBCASE("unscored benchmarks without profiles") {
    const auto r = cli({"profile", "--benchmarks", case_file("benchmarks.json").string(), "--models",
                        case_file("models.json").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("MATH-500") != std::string::npos);
  }
  SUBCASE("unprofiled benchmarks without a client") {
    ::unsetenv("PROFILER_ENDPOINT");
    const auto r = cli({"profile", "--benchmarks", case_file("benchmarks_unprofiled.json").string(), "--out",
                        dir.string()});
    CHECK(r.code == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("argument and input errors") {
  const auto dir = scratch("errors");
  CHECK(cli({}).code != 0);
  CHECK(cli({"route", "--cost-sensitivity", "0.5"}).code == 2);
  auto args = case_args("route", dir);
  args.insert(args.end(), {"--cost-sensitivity", "1.5"});
  CHECK(cli(args).code != 0);
  auto both = case_args("route", dir);
  both.insert(both.end(), {"--cost-sensitivity", "0.5", "--budget", "5"});
  CHECK(cli(both).code == 2);
  auto missing = case_args("route", dir);
  missing[2] = (dir / "nope.json").string();
  missing.insert(missing.end(), {"--cost-sensitivity", "0.5"});
  CHECK(cli(missing).code == 2);
  fs::remove_all(dir);
}
