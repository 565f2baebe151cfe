#include "skillroute/cli.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "skillroute/error.hpp"
#include "skillroute/explainer.hpp"
#include "skillroute/json_io.hpp"
#include "skillroute/llm_client.hpp"
#include "skillroute/models.hpp"
#include "skillroute/profiler.hpp"
#include "skillroute/routing.hpp"
#include "skillroute/skills.hpp"
#include "skillroute/workflow.hpp"

namespace fs = std::filesystem;

namespace skillroute {

namespace {

struct Options {
  std::string skills;
  std::string models;
  std::string benchmarks;
  std::string profiles;
  std::string workflow;
  std::string fixtures;
  std::string record;
  std::string seeds;
  std::string out = "skillroute_out";
  std::string mode;
  std::optional<double> cost_sensitivity;
  std::optional<double> budget;
  std::int64_t runs = kDefaultRuns;
  double kappa = kDefaultKappa;
  std::vector<std::string> overrides;
  std::string penalty_fixture;
  bool explain = false;
  bool dry_run_explain = false;
  std::vector<double> sweep_cost;
  std::vector<double> sweep_budget;
  std::size_t parallel = 4;
};

/// Owns whichever completion client the flags select.
struct ClientStack {
  std::unique_ptr<CompletionClient> base;
  std::unique_ptr<CompletionClient> recorder;

  CompletionClient* get() const { return recorder ? recorder.get() : base.get(); }
};

ClientStack make_client(const Options& o) {
  ClientStack s;
  if (!o.fixtures.empty()) {
    s.base = std::make_unique<FixtureCompletionClient>(o.fixtures);
  } else if (auto cfg = EndpointConfig::from_env()) {
    s.base = std::make_unique<HttpCompletionClient>(*cfg);
  }
  if (s.base && !o.record.empty()) s.recorder = std::make_unique<RecordingCompletionClient>(*s.base, o.record);
  return s;
}

Taxonomy load_skills(const Options& o) {
  return o.skills.empty() ? Taxonomy::canonical() : load_taxonomy(o.skills);
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw Error(ErrorKind::config, fmt::format("{} needs {}", command, flag));
}

void warn_all(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) fmt::print(err, "warning: {}\n", w);
}

std::string initials(const std::string& name) {
  std::string out;
  bool start = true;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) && start) out += static_cast<char>(std::toupper(c));
    start = !std::isalnum(static_cast<unsigned char>(c));
  }
  return out;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

/// Exact name, then case-insensitive name, then unique initials ("ES").
std::string resolve_task(const Workflow& wf, const std::string& key) {
  if (wf.find(key)) return key;
  std::vector<std::string> hits;
  for (const auto& t : wf.subtasks)
    if (upper(t.name) == upper(key)) hits.push_back(t.name);
  if (hits.empty())
    for (const auto& t : wf.subtasks)
      if (initials(t.name) == upper(key)) hits.push_back(t.name);
  if (hits.size() == 1) return hits.front();
  if (hits.empty()) throw Error(ErrorKind::validation, fmt::format("--override-quality names unknown task '{}'", key));
  throw Error(ErrorKind::validation, fmt::format("--override-quality task '{}' is ambiguous", key));
}

Workflow apply_overrides(Workflow wf, const std::vector<std::string>& overrides) {
  for (const auto& spec : overrides) {
    const auto eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::validation, fmt::format("--override-quality expects NAME=VALUE, got '{}'", spec));
    double q = 0.0;
    try {
      std::size_t used = 0;
      q = std::stod(spec.substr(eq + 1), &used);
      if (used != spec.size() - eq - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw Error(ErrorKind::validation, fmt::format("--override-quality value in '{}' is not a number", spec));
    }
    wf = apply_quality_override(wf, resolve_task(wf, spec.substr(0, eq)), q);
  }
  return wf;
}

ProfileSet resolve_profiles(const Options& o, const Taxonomy& tax, const std::vector<ModelRecord>& models,
                            std::ostream& err) {
  if (!o.profiles.empty()) return load_profiles(o.profiles, tax, o.kappa);
  if (o.benchmarks.empty()) throw Error(ErrorKind::config, "routing needs --profiles or scored --benchmarks");
  const auto benches = load_benchmarks(o.benchmarks, tax);
  auto report = compute_capabilities(benches, models, tax);
  warn_all(err, report.warnings);
  ProfileSet set{o.kappa, {}};
  for (auto& p : report.profiles) set.profiles.push_back(calibrate(std::move(p), o.kappa));
  return set;
}

RoutingInputs load_inputs(const Options& o, const Taxonomy& tax, std::ostream& err, const char* command) {
  require(o.models, "--models", command);
  require(o.workflow, "--workflow", command);
  check_kappa(o.kappa);
  RoutingInputs in;
  in.models = load_models(o.models);
  in.workflow = apply_overrides(load_workflow(o.workflow, tax), o.overrides);
  in.profiles = resolve_profiles(o, tax, in.models, err);
  if (!o.penalty_fixture.empty()) in.injected_penalties = load_penalty_table(o.penalty_fixture);
  return in;
}

std::string fixed3(double v) { return fmt::format("{:.3f}", v); }

void print_result(std::ostream& out, const RoutingResult& r) {
  const bool objective = r.config.mode == RoutingMode::objective;
  if (objective) {
    fmt::print(out, "objective routing  c_global={:g}  runs={}  kappa={:g}{}\n", *r.config.c_global, r.config.runs,
               r.config.kappa, r.config.injected_penalties ? "  penalties=injected" : "");
  } else {
    fmt::print(out, "budget routing  budget={}  runs={}  kappa={:g}\n", r.config.budget->to_display(), r.config.runs,
               r.config.kappa);
  }
  const char* cost_head = objective ? "C" : "cost";
  fmt::print(out, "{:<24} {:<18} {:>6} {:>8} {:>7}  {:<18} {:>6} {:>8} {:>7} {:>7}  {}\n", "task", "winner", "M",
             cost_head, "S", "runner-up", "M", cost_head, "S", "delta", "factor");
  auto cost_cell = [&](const CandidateScore& c) { return objective ? fixed3(c.penalty) : c.cost.to_display(); };
  for (const auto& d : r.decisions) {
    const auto& w = d.winner();
    const auto* ru = d.runner_up();
    fmt::print(out, "{:<24} {:<18} {:>6} {:>8} {:>7}  {:<18} {:>6} {:>8} {:>7} {:>7}  {}\n", d.task, w.model,
               fixed3(w.match), cost_cell(w), fixed3(w.objective), ru ? ru->model : "-", ru ? fixed3(ru->match) : "-",
               ru ? cost_cell(*ru) : "-", ru ? fixed3(ru->objective) : "-", fixed3(d.margin), to_string(d.factor));
  }
  fmt::print(out, "total cost {} for {} runs, total quality {:.3f}\n", r.total_cost.to_display(), r.config.runs,
             r.total_quality);
}

void explain_run(const Options& o, const RoutingResult& result, const RoutingInputs& in, const Taxonomy& tax,
                 std::ostream& out, std::ostream& err) {
  const ExplanationLog log = build_log(result, in.workflow, tax);
  const fs::path dir(o.out);
  write_json_file(dir / "explanation_log.json", to_json(log));
  if (!o.explain && !o.dry_run_explain) return;
  ClientStack client;
  if (!o.dry_run_explain) {
    client = make_client(o);
    if (!client.get())
      throw Error(ErrorKind::config, "--explain needs --fixtures or PROFILER_ENDPOINT (or use --dry-run-explain)");
  }
  Explainer explainer(client.get(), {.dry_run = o.dry_run_explain, .max_parallel = o.parallel});
  const auto explanations = explainer.explain_all(log);
  const std::string text = format_explanations(explanations);
  write_text_file(dir / "explanations.txt", text);
  for (const auto& e : explanations) warn_all(err, e.warnings);
  if (!o.dry_run_explain) out << '\n' << text;
}

int cmd_route(const Options& o, std::ostream& out, std::ostream& err) {
  const Taxonomy tax = load_skills(o);
  const RoutingInputs in = load_inputs(o, tax, err, "route");
  std::string mode = o.mode;
  if (mode.empty()) mode = o.budget ? "budget" : "objective";
  RoutingResult result;
  if (mode == "objective") {
    if (o.budget) throw Error(ErrorKind::config, "--budget does not apply to objective mode");
    if (!o.cost_sensitivity) throw Error(ErrorKind::config, "objective mode needs --cost-sensitivity");
    result = objective_route(in, *o.cost_sensitivity, o.runs);
  } else if (mode == "budget") {
    if (o.cost_sensitivity) throw Error(ErrorKind::config, "--cost-sensitivity does not apply to budget mode");
    if (!o.budget) throw Error(ErrorKind::config, "budget mode needs --budget");
    result = budget_route(in, Money::from_usd(*o.budget), o.runs);
  } else {
    throw Error(ErrorKind::config, fmt::format("unknown --mode '{}'", mode));
  }
  write_json_file(fs::path(o.out) / "routing_result.json", to_json(result));
  print_result(out, result);
  explain_run(o, result, in, tax, out, err);
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Taxonomy tax = load_skills(o);
  const RoutingInputs in = load_inputs(o, tax, err, "sweep");
  if (o.sweep_cost.empty() == o.sweep_budget.empty())
    throw Error(ErrorKind::config, "sweep needs exactly one of --sweep-cost or --sweep-budget");
  std::vector<SweepStep> steps;
  if (!o.sweep_cost.empty()) {
    steps = sweep_cost(in, o.sweep_cost, o.runs);
  } else {
    std::vector<Money> budgets;
    for (double b : o.sweep_budget) budgets.push_back(Money::from_usd(b));
    steps = sweep_budget(in, budgets, o.runs);
  }
  write_json_file(fs::path(o.out) / "sweep.json", to_json(steps));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out << '\n';
    print_result(out, steps[i].result);
    for (const auto& c : steps[i].changes) fmt::print(out, "  changed: {}: {} -> {}\n", c.task, c.from, c.to);
  }
  return 0;
}

int cmd_profile(const Options& o, std::ostream& out, std::ostream& err) {
  const Taxonomy tax = load_skills(o);
  if (o.benchmarks.empty() && o.profiles.empty() && o.workflow.empty())
    throw Error(ErrorKind::config, "profile needs --benchmarks, --profiles or --workflow");
  check_kappa(o.kappa);
  const fs::path dir(o.out);
  ClientStack client = make_client(o);
  ProfilerOptions popts;
  popts.max_parallel = o.parallel;
  Json trace{{"schema_version", kSchemaVersion}};

  std::optional<ProfileSet> profiles;
  if (!o.benchmarks.empty()) {
    auto benches = load_benchmarks(o.benchmarks, tax);
    std::vector<std::string> unprofiled;
    for (const auto& b : benches)
      if (!b.skill_weights) unprofiled.push_back(b.name);
    if (!unprofiled.empty()) {
      if (!client.get()) {
        throw Error(ErrorKind::validation,
                    fmt::format("benchmark(s) without skill weights and no --fixtures or PROFILER_ENDPOINT: {}",
                                fmt::join(unprofiled, ", ")),
                    unprofiled);
      }
      Profiler profiler(*client.get(), tax, popts);
      std::map<std::string, ProfilerResponse> responses;
      benches = profiler.profile_benchmarks(std::move(benches), &responses);
      for (const auto& [name, r] : responses) {
        warn_all(err, r.warnings);
        trace["benchmarks"][name] = to_json(r);
      }
      write_json_file(dir / "benchmarks.json", to_json(benches));
      fmt::print(out, "profiled {} benchmark(s)\n", responses.size());
    }
    std::vector<std::string> unscored;
    for (const auto& b : benches)
      if (b.scores.empty()) unscored.push_back(b.name);
    if (unscored.empty()) {
      require(o.models, "--models", "capability profiling");
      auto report = compute_capabilities(benches, load_models(o.models), tax);
      warn_all(err, report.warnings);
      ProfileSet set{o.kappa, {}};
      for (auto& p : report.profiles) set.profiles.push_back(calibrate(std::move(p), o.kappa));
      profiles = std::move(set);
    } else if (o.profiles.empty()) {
      throw Error(ErrorKind::validation,
                  fmt::format("benchmark(s) have no model scores: {}", fmt::join(unscored, ", ")), unscored);
    } else {
      fmt::print(err, "warning: benchmarks carry no model scores; capability profiles taken from {}\n", o.profiles);
    }
  }
  if (!profiles && !o.profiles.empty()) profiles = load_profiles(o.profiles, tax, o.kappa);
  if (profiles) {
    write_json_file(dir / "profiles.json", to_json(*profiles));
    fmt::print(out, "wrote capability profiles for {} model(s), kappa={:g}\n", profiles->profiles.size(),
               profiles->kappa);
  }

  if (!o.workflow.empty()) {
    Workflow wf = load_workflow(o.workflow, tax);
    const auto pending = wf.unprofiled();
    if (!pending.empty()) {
      if (!client.get()) {
        throw Error(ErrorKind::validation,
                    fmt::format("subtask(s) need profiling and no --fixtures or PROFILER_ENDPOINT: {}",
                                fmt::join(pending, ", ")),
                    pending);
      }
      Profiler profiler(*client.get(), tax, popts);
      auto result = profiler.profile_subtasks(wf);
      for (const auto& [name, r] : result.skills) {
        warn_all(err, r.warnings);
        trace["subtasks"][name] = to_json(r);
      }
      if (result.metadata) {
        warn_all(err, result.metadata->warnings);
        trace["pipeline_metadata"] = to_json(*result.metadata);
      }
      wf = std::move(result.workflow);
      fmt::print(out, "profiled {} subtask(s)\n", pending.size());
    }
    write_json_file(dir / "workflow.json", to_json(wf));
  }
  if (trace.size() > 1) write_json_file(dir / "profiler_trace.json", trace);
  return 0;
}

std::string completion_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

/// Renders each seeded prompt from the given inputs and stores the seed text as
/// its replay fixture.
int cmd_record(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.seeds, "--seeds", "record-fixtures");
  require(o.fixtures, "--fixtures", "record-fixtures");
  const Taxonomy tax = load_skills(o);
  const Json seeds = read_json_file(o.seeds);
  const fs::path dir(o.fixtures);
  FixtureCompletionClient unused(dir);
  Profiler renderer(unused, tax);
  std::size_t written = 0;

  if (seeds.contains("benchmark_profile")) {
    require(o.benchmarks, "--benchmarks", "benchmark seeds");
    for (const auto& b : load_benchmarks(o.benchmarks, tax)) {
      if (!seeds["benchmark_profile"].contains(b.name)) continue;
      write_fixture(dir, TemplateId::benchmark_profile, b.name, renderer.render_benchmark_prompt(b),
                    completion_text(seeds["benchmark_profile"][b.name]));
      ++written;
    }
  }
  if (seeds.contains("subtask_profile") || seeds.contains("pipeline_metadata")) {
    require(o.workflow, "--workflow", "subtask seeds");
    const Workflow wf = load_workflow(o.workflow, tax);
    for (const auto& t : wf.subtasks) {
      if (!seeds.contains("subtask_profile") || !seeds["subtask_profile"].contains(t.name)) continue;
      write_fixture(dir, TemplateId::subtask_profile, t.name, renderer.render_subtask_prompt(t),
                    completion_text(seeds["subtask_profile"][t.name]));
      ++written;
    }
    if (seeds.contains("pipeline_metadata")) {
      write_fixture(dir, TemplateId::pipeline_metadata, wf.name, renderer.render_metadata_prompt(wf),
                    completion_text(seeds["pipeline_metadata"]));
      ++written;
    }
  }
  if (seeds.contains("routing_explanation")) {
    const RoutingInputs base = load_inputs(o, tax, err, "explanation seeds");
    Explainer explainer(nullptr, {.dry_run = true});
    for (const auto& run : seeds["routing_explanation"]) {
      RoutingInputs in = base;
      for (const auto& [task, q] : run.value("overrides", Json::object()).items())
        in.workflow = apply_quality_override(in.workflow, task, q.get<double>());
      const std::int64_t runs = run.value("runs", kDefaultRuns);
      const RoutingResult result = run.contains("budget")
                                       ? budget_route(in, Money::from_usd(run["budget"].get<double>()), runs)
                                       : objective_route(in, run.at("cost_sensitivity").get<double>(), runs);
      const ExplanationLog log = build_log(result, in.workflow, tax);
      for (const auto& [scope, text] : run.at("texts").items()) {
        const LogSlice slice = scope == "global" ? global_slice(log) : local_slice(log, scope);
        write_fixture(dir, TemplateId::routing_explanation, slice.scope(), explainer.render(slice),
                      completion_text(text));
        ++written;
      }
    }
  }
  fmt::print(out, "wrote {} fixture(s) to {}\n", written, dir.string());
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--skills", o.skills, "Skill taxonomy JSON (default: built-in eight skills)");
  cmd->add_option("--models", o.models, "Model price list JSON");
  cmd->add_option("--benchmarks", o.benchmarks, "Benchmark records JSON");
  cmd->add_option("--profiles", o.profiles, "Capability profiles JSON");
  cmd->add_option("--workflow", o.workflow, "Workflow JSON");
  cmd->add_option("--kappa", o.kappa, "Calibration factor in (0, 1]")->capture_default_str();
  cmd->add_option("--fixtures", o.fixtures, "Replay completions from this fixture directory");
  cmd->add_option("--parallel", o.parallel, "Concurrent completion calls")->capture_default_str();
}

void add_routing(CLI::App* cmd, Options& o) {
  cmd->add_option("--runs", o.runs, "Workflow executions to cost")->capture_default_str();
  cmd->add_option("--override-quality", o.overrides, "Task quality sensitivity override, NAME=VALUE (repeatable)");
  cmd->add_option("--penalty-fixture", o.penalty_fixture, "Inject cost penalties from JSON instead of computing them");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Skill-based, cost-aware routing of workflow subtasks to language models"};
  app.name("skillroute");
  app.require_subcommand(1);

  auto* profile = app.add_subcommand("profile", "Profile benchmarks and subtasks, build capability profiles");
  add_common(profile, o);
  profile->add_option("--record", o.record, "Also save every live completion as a fixture here");
  profile->add_option("--out", o.out, "Output directory")->capture_default_str();

  auto* route = app.add_subcommand("route", "Assign each subtask to a model");
  add_common(route, o);
  add_routing(route, o);
  route->add_option("--mode", o.mode, "objective or budget (default: inferred)")
      ->check(CLI::IsMember({"objective", "budget"}));
  route->add_option("--cost-sensitivity", o.cost_sensitivity, "c_global in [0, 1] (objective mode)");
  route->add_option("--budget", o.budget, "Budget in USD for --runs executions (budget mode)");
  route->add_flag("--explain", o.explain, "Render explanations through the completion endpoint or fixtures");
  route->add_flag("--dry-run-explain", o.dry_run_explain, "Write the rendered explanation prompts instead");
  route->add_option("--record", o.record, "Also save every live completion as a fixture here");

  auto* sweep = app.add_subcommand("sweep", "Route at several settings and report assignment changes");
  add_common(sweep, o);
  add_routing(sweep, o);
  sweep->add_option("--sweep-cost", o.sweep_cost, "Comma-separated c_global values")->delimiter(',');
  sweep->add_option("--sweep-budget", o.sweep_budget, "Comma-separated budgets in USD")->delimiter(',');

  auto* record = app.add_subcommand("record-fixtures", "Turn seed completions into replay fixtures");
  add_common(record, o);
  record->add_option("--seeds", o.seeds, "Seed completions JSON");
  record->add_option("--penalty-fixture", o.penalty_fixture, "Inject cost penalties from JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*profile) return cmd_profile(o, out, err);
    if (*route) return cmd_route(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*record) return cmd_record(o, out, err);
  } catch (const Error& e) {
    fmt::print(err, "error ({}): {}\n", to_string(e.kind()), e.what());
    for (const auto& d : e.details()) {
      fmt::print(err, "  {}\n", d.size() > 400 ? d.substr(0, 400) + "..." : d);
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace skillroute
