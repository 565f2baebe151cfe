#include "skillroute/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "skillroute/cost.hpp"
#include "skillroute/error.hpp"

namespace skillroute {

MatchBreakdown match_score(const CapabilityProfile& profile, const SubtaskProfile& task) {
  if (!task.requirements) throw Error(ErrorKind::incomplete, fmt::format("subtask '{}' has no skill requirements", task.name));
  if (!task.complexity || !(*task.complexity > 0.0))
    throw Error(ErrorKind::incomplete, fmt::format("subtask '{}' needs a positive complexity", task.name));
  const double k = *task.complexity;

  MatchBreakdown out{.model = profile.model, .task = task.name, .skills = {}, .total = 0.0, .uncapped_total = 0.0,
                     .capped_skills = {}};
  for (const auto& [skill, r] : task.requirements->weights()) {
    if (!(r > 0.0)) continue;
    auto it = profile.calibrated.find(skill);
    if (it == profile.calibrated.end()) {
      throw Error(ErrorKind::incomplete,
                  fmt::format("profile for '{}' lacks required skill '{}' (task '{}')", profile.model, skill, task.name));
    }
    SkillFulfillment f;
    f.skill = skill;
    f.requirement = r;
    f.capability = it->second;
    f.uncapped_ratio = f.capability / (k * r);
    f.ratio = std::min(1.0, f.uncapped_ratio);
    f.contribution = f.ratio * r;
    out.total += f.contribution;
    out.uncapped_total += f.uncapped_ratio * r;
    if (f.capped()) out.capped_skills.insert(skill);
    out.skills.push_back(std::move(f));
  }
  return out;
}

double quality_weight(double q, double c) { return q * std::max(1.0 - c, kEpsilon); }
double cost_weight(double q, double c) { return c * std::max(1.0 - q, kEpsilon); }

double objective_score(double q, double c, double match, double penalty) {
  return quality_weight(q, c) * match - cost_weight(q, c) * penalty;
}

std::pair<std::size_t, TieBreakRule> break_tie(std::span<const CandidateScore> tied) {
  if (tied.empty()) throw Error(ErrorKind::domain, "break_tie needs at least one candidate");
  std::vector<std::size_t> pool(tied.size());
  std::iota(pool.begin(), pool.end(), 0);
  if (pool.size() == 1) return {0, TieBreakRule::none};

  double best_uncapped = -std::numeric_limits<double>::infinity();
  for (auto i : pool) best_uncapped = std::max(best_uncapped, tied[i].breakdown.uncapped_total);
  std::erase_if(pool, [&](std::size_t i) { return tied[i].breakdown.uncapped_total < best_uncapped - kTieTolerance; });
  if (pool.size() == 1) return {pool.front(), TieBreakRule::uncapped_match};

  double best_penalty = std::numeric_limits<double>::infinity();
  for (auto i : pool) best_penalty = std::min(best_penalty, tied[i].penalty);
  std::erase_if(pool, [&](std::size_t i) { return tied[i].penalty > best_penalty + kTieTolerance; });
  if (pool.size() == 1) return {pool.front(), TieBreakRule::cost};

  auto it = std::min_element(pool.begin(), pool.end(),
                             [&](std::size_t a, std::size_t b) { return tied[a].model < tied[b].model; });
  return {*it, TieBreakRule::name};
}

std::vector<CandidateScore> rank_candidates(std::vector<CandidateScore> pool, TieBreakRule* winner_rule) {
  std::vector<CandidateScore> ranked;
  ranked.reserve(pool.size());
  bool first = true;
  while (!pool.empty()) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : pool) best = std::max(best, c.objective);
    std::vector<std::size_t> tied_idx;
    std::vector<CandidateScore> tied;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].objective >= best - kTieTolerance) {
        tied_idx.push_back(i);
        tied.push_back(pool[i]);
      }
    }
    auto [pick, rule] = break_tie(tied);
    if (first && winner_rule) *winner_rule = rule;
    first = false;
    const std::size_t chosen = tied_idx[pick];
    ranked.push_back(std::move(pool[chosen]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return ranked;
}

std::string_view to_string(DecisiveFactor f) {
  switch (f) {
    case DecisiveFactor::match_dominant: return "match-dominant";
    case DecisiveFactor::cost_dominant: return "cost-dominant";
    case DecisiveFactor::quality_weight_decisive: return "quality-weight-decisive";
    case DecisiveFactor::tiebreak_uncapped: return "tiebreak-uncapped";
    case DecisiveFactor::tiebreak_cost: return "tiebreak-cost";
    case DecisiveFactor::tiebreak_name: return "tiebreak-name";
    case DecisiveFactor::budget_constrained: return "budget-constrained";
  }
  return "unknown";
}

DecisiveFactor decisive_factor_from_string(std::string_view s) {
  for (auto f : {DecisiveFactor::match_dominant, DecisiveFactor::cost_dominant,
                 DecisiveFactor::quality_weight_decisive, DecisiveFactor::tiebreak_uncapped,
                 DecisiveFactor::tiebreak_cost, DecisiveFactor::tiebreak_name, DecisiveFactor::budget_constrained}) {
    if (to_string(f) == s) return f;
  }
  throw Error(ErrorKind::validation, fmt::format("unknown decisive factor '{}'", s));
}

std::string_view to_string(RoutingMode mode) { return mode == RoutingMode::objective ? "objective" : "budget"; }

std::vector<std::pair<std::string, std::string>> RoutingResult::assignments() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& d : decisions) out.emplace_back(d.task, d.winner().model);
  return out;
}

const RoutingDecision* RoutingResult::find(const std::string& task) const {
  for (const auto& d : decisions)
    if (d.task == task) return &d;
  return nullptr;
}

PenaltyTable parse_penalty_table(const Json& doc) {
  const Json* table = &doc;
  if (doc.is_object() && doc.contains("penalties")) table = &doc["penalties"];
  if (!table->is_object()) throw Error(ErrorKind::validation, "penalty fixture: expected an object of tasks");
  PenaltyTable out;
  for (const auto& [task, models] : table->items()) {
    if (!models.is_object()) throw Error(ErrorKind::validation, fmt::format("penalty fixture: task '{}' must map models", task));
    for (const auto& [model, val] : models.items()) {
      if (!val.is_number() || val.get<double>() < 0.0 || val.get<double>() > 1.0)
        throw Error(ErrorKind::validation,
                    fmt::format("penalty fixture: penalty for '{}' on '{}' must lie in [0, 1]", model, task));
      out[task][model] = val.get<double>();
    }
  }
  return out;
}

PenaltyTable load_penalty_table(const std::filesystem::path& path) { return parse_penalty_table(read_json_file(path)); }

namespace {

void check_inputs(const RoutingInputs& in) {
  if (in.models.empty()) throw Error(ErrorKind::config, "routing needs at least one model");
  require_profiled(in.workflow);
  std::vector<std::string> missing;
  for (const auto& m : in.models)
    if (!in.profiles.find(m.name)) missing.push_back(m.name);
  if (!missing.empty())
    throw Error(ErrorKind::incomplete, fmt::format("no capability profile for model(s): {}", fmt::join(missing, ", ")),
                missing);
}

std::vector<ModelRecord> sorted_models(const std::vector<ModelRecord>& models) {
  auto out = models;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::map<std::string, double> penalties_for(const RoutingInputs& in, const SubtaskProfile& task, double s) {
  if (!in.injected_penalties) return cost_penalty(in.models, s);
  auto it = in.injected_penalties->find(task.name);
  if (it == in.injected_penalties->end())
    throw Error(ErrorKind::incomplete, fmt::format("penalty fixture has no entry for task '{}'", task.name));
  for (const auto& m : in.models) {
    if (!it->second.contains(m.name))
      throw Error(ErrorKind::incomplete,
                  fmt::format("penalty fixture has no penalty for model '{}' on task '{}'", m.name, task.name));
  }
  return it->second;
}

struct TaskCandidates {
  std::vector<CandidateScore> candidates;  // model-name order
  double q = 0.0;
  double skew = 0.0;
};

/// Scores every model on a task; `c_global` unset means budget mode
/// (objective = q * match).
TaskCandidates score_task(const RoutingInputs& in, const std::vector<ModelRecord>& models, const SubtaskProfile& task,
                          std::optional<double> c_global, std::int64_t runs) {
  TaskCandidates out;
  out.q = task.effective_quality();
  out.skew = skew(*task.est_input_tokens, *task.est_output_tokens);
  auto penalties = penalties_for(in, task, out.skew);
  for (const auto& m : models) {
    CandidateScore c;
    c.model = m.name;
    c.breakdown = match_score(*in.profiles.find(m.name), task);
    c.match = c.breakdown.total;
    c.penalty = penalties.at(m.name);
    c.cost = cost_abs(m, *task.est_input_tokens, *task.est_output_tokens, runs);
    c.objective = c_global ? objective_score(out.q, *c_global, c.match, c.penalty) : out.q * c.match;
    out.candidates.push_back(std::move(c));
  }
  return out;
}

DecisiveFactor tie_factor(TieBreakRule rule) {
  switch (rule) {
    case TieBreakRule::uncapped_match: return DecisiveFactor::tiebreak_uncapped;
    case TieBreakRule::cost: return DecisiveFactor::tiebreak_cost;
    default: return DecisiveFactor::tiebreak_name;
  }
}

}  // namespace

RoutingResult objective_route(const RoutingInputs& in, double c_global, std::int64_t runs) {
  if (!(c_global >= 0.0 && c_global <= 1.0))
    throw Error(ErrorKind::config, fmt::format("cost sensitivity {} outside [0, 1]", c_global));
  if (runs < 1) throw Error(ErrorKind::config, "runs must be at least 1");
  check_inputs(in);
  const auto models = sorted_models(in.models);

  RoutingResult result;
  result.config.mode = RoutingMode::objective;
  result.config.c_global = c_global;
  result.config.runs = runs;
  result.config.kappa = in.profiles.kappa;
  result.config.injected_penalties = in.injected_penalties.has_value();

  for (const auto& task : in.workflow.subtasks) {
    auto scored = score_task(in, models, task, c_global, runs);
    RoutingDecision d;
    d.task = task.name;
    d.quality_sensitivity = scored.q;
    d.skew = scored.skew;
    d.quality_weight = quality_weight(scored.q, c_global);
    d.cost_weight = cost_weight(scored.q, c_global);
    TieBreakRule rule = TieBreakRule::none;
    d.candidates = rank_candidates(std::move(scored.candidates), &rule);
    d.winner_index = 0;
    if (d.candidates.size() > 1) {
      d.runner_up_index = 1;
      const auto& w = d.candidates[0];
      const auto& r = d.candidates[1];
      d.margin = w.objective - r.objective;
      if (d.margin <= kTieTolerance) {
        d.factor = tie_factor(rule);
      } else {
        const double quality_gain = d.quality_weight * (w.match - r.match);
        const double cost_gain = d.cost_weight * (r.penalty - w.penalty);
        if (cost_gain > quality_gain) d.factor = DecisiveFactor::cost_dominant;
        else if (c_global > 0.5) d.factor = DecisiveFactor::quality_weight_decisive;
        else d.factor = DecisiveFactor::match_dominant;
      }
    }
    result.total_cost += d.winner().cost;
    result.total_quality += scored.q * d.winner().match;
    result.decisions.push_back(std::move(d));
  }
  return result;
}

std::vector<std::vector<std::int64_t>> budget_cost_cents(const RoutingInputs& in, std::int64_t runs) {
  const auto models = sorted_models(in.models);
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& t : in.workflow.subtasks) {
    std::vector<std::int64_t> row;
    for (const auto& m : models) row.push_back(cost_abs(m, *t.est_input_tokens, *t.est_output_tokens, runs).cents_ceil());
    out.push_back(std::move(row));
  }
  return out;
}

RoutingResult budget_route(const RoutingInputs& in, Money budget, std::int64_t runs) {
  if (budget <= Money{}) throw Error(ErrorKind::domain, "budget must be positive");
  if (runs < 1) throw Error(ErrorKind::config, "runs must be at least 1");
  check_inputs(in);
  const auto models = sorted_models(in.models);
  const std::size_t n = in.workflow.subtasks.size();
  const std::size_t m_count = models.size();

  std::vector<TaskCandidates> scored;
  for (const auto& t : in.workflow.subtasks) scored.push_back(score_task(in, models, t, std::nullopt, runs));
  const auto cents = budget_cost_cents(in, runs);

  std::int64_t cheapest = 0;
  std::int64_t priciest = 0;
  Money cheapest_exact;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = 0;
    for (std::size_t j = 1; j < m_count; ++j)
      if (cents[i][j] < cents[i][lo]) lo = j;
    cheapest += cents[i][lo];
    cheapest_exact += scored[i].candidates[lo].cost;
    priciest += *std::max_element(cents[i].begin(), cents[i].end());
  }
  const std::int64_t budget_cents = budget.cents_floor();
  if (cheapest > budget_cents) {
    throw Error(ErrorKind::infeasible,
                fmt::format("budget {} cannot cover the cheapest plan, which costs {} ({} at cent granularity)",
                            budget.to_display(), cheapest_exact.to_display(), Money::from_cents(cheapest).to_display()),
                {fmt::format("cheapest_plan_usd={}", cheapest_exact.to_decimal())});
  }
  // Columns beyond the most expensive plan add nothing.
  const std::int64_t columns = std::min(budget_cents, priciest) + 1;

  // quality[b] / spent[b]: best plan over the first i tasks costing at most b cents.
  constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
  std::vector<double> quality(static_cast<std::size_t>(columns), 0.0);
  std::vector<std::int64_t> spent(static_cast<std::size_t>(columns), 0);
  std::vector<std::vector<std::int32_t>> choice(n, std::vector<std::int32_t>(static_cast<std::size_t>(columns), -1));

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> next_q(static_cast<std::size_t>(columns), kInfeasible);
    std::vector<std::int64_t> next_spent(static_cast<std::size_t>(columns), 0);
    for (std::int64_t b = 0; b < columns; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      for (std::size_t j = 0; j < m_count; ++j) {
        const std::int64_t c = cents[i][j];
        if (c > b) continue;
        const auto prev = static_cast<std::size_t>(b - c);
        if (quality[prev] == kInfeasible) continue;
        const double q = quality[prev] + scored[i].candidates[j].objective;
        const std::int64_t s = spent[prev] + c;
        const bool better = next_q[bi] == kInfeasible || q > next_q[bi] + kTieTolerance ||
                            (q >= next_q[bi] - kTieTolerance && s < next_spent[bi]);
        if (better) {
          next_q[bi] = q;
          next_spent[bi] = s;
          choice[i][bi] = static_cast<std::int32_t>(j);
        }
      }
    }
    quality = std::move(next_q);
    spent = std::move(next_spent);
  }

  std::vector<std::size_t> picks(n);
  std::int64_t b = columns - 1;
  for (std::size_t i = n; i-- > 0;) {
    const auto j = choice[i][static_cast<std::size_t>(b)];
    if (j < 0) throw Error(ErrorKind::domain, "budget table backtrace reached an infeasible cell");
    picks[i] = static_cast<std::size_t>(j);
    b -= cents[i][static_cast<std::size_t>(j)];
  }

  RoutingResult result;
  result.config.mode = RoutingMode::budget;
  result.config.budget = budget;
  result.config.runs = runs;
  result.config.kappa = in.profiles.kappa;
  result.config.injected_penalties = in.injected_penalties.has_value();
  result.dp = DpSummary{.tasks = n, .models = m_count, .columns = columns, .step = Money::from_cents(1)};

  for (std::size_t i = 0; i < n; ++i) {
    const std::string chosen = scored[i].candidates[picks[i]].model;
    RoutingDecision d;
    d.task = in.workflow.subtasks[i].name;
    d.quality_sensitivity = scored[i].q;
    d.skew = scored[i].skew;
    d.quality_weight = scored[i].q;
    d.cost_weight = 0.0;
    d.candidates = rank_candidates(std::move(scored[i].candidates));
    for (std::size_t k = 0; k < d.candidates.size(); ++k)
      if (d.candidates[k].model == chosen) d.winner_index = k;
    const auto& w = d.candidates[d.winner_index];
    if (d.candidates.size() > 1) {
      d.runner_up_index = d.winner_index == 0 ? 1 : 0;
      const auto& r = d.candidates[*d.runner_up_index];
      d.margin = w.objective - r.objective;
      if (d.margin < -kTieTolerance) d.factor = DecisiveFactor::budget_constrained;
      else if (d.margin <= kTieTolerance)
        d.factor = w.cost < r.cost ? DecisiveFactor::tiebreak_cost : DecisiveFactor::tiebreak_name;
      else d.factor = DecisiveFactor::match_dominant;
    }
    result.total_cost += w.cost;
    result.total_quality += w.objective;
    result.decisions.push_back(std::move(d));
  }
  return result;
}

namespace {

std::vector<AssignmentChange> diff(const RoutingResult* prev, const RoutingResult& cur) {
  std::vector<AssignmentChange> out;
  if (!prev) return out;
  for (const auto& d : cur.decisions) {
    const auto* p = prev->find(d.task);
    if (p && p->winner().model != d.winner().model) out.push_back({d.task, p->winner().model, d.winner().model});
  }
  return out;
}

}  // namespace

std::vector<SweepStep> sweep_cost(const RoutingInputs& in, std::span<const double> settings, std::int64_t runs) {
  if (settings.empty()) throw Error(ErrorKind::config, "sweep needs at least one setting");
  std::vector<SweepStep> out;
  for (double c : settings) {
    SweepStep step{.setting = c, .result = objective_route(in, c, runs), .changes = {}};
    step.changes = diff(out.empty() ? nullptr : &out.back().result, step.result);
    out.push_back(std::move(step));
  }
  return out;
}

std::vector<SweepStep> sweep_budget(const RoutingInputs& in, std::span<const Money> budgets, std::int64_t runs) {
  if (budgets.empty()) throw Error(ErrorKind::config, "sweep needs at least one budget");
  std::vector<SweepStep> out;
  for (Money b : budgets) {
    SweepStep step{.setting = b.usd(), .result = budget_route(in, b, runs), .changes = {}};
    step.changes = diff(out.empty() ? nullptr : &out.back().result, step.result);
    out.push_back(std::move(step));
  }
  return out;
}

Json to_json(const MatchBreakdown& b) {
  Json skills = Json::array();
  for (const auto& f : b.skills) {
    skills.push_back({{"skill", f.skill},
                      {"requirement", f.requirement},
                      {"capability", f.capability},
                      {"uncapped_ratio", f.uncapped_ratio},
                      {"ratio", f.ratio},
                      {"contribution", f.contribution}});
  }
  return Json{{"skills", skills}, {"total", b.total}, {"uncapped_total", b.uncapped_total}};
}

Json to_json(const CandidateScore& c, RoutingMode mode) {
  return Json{{"model", c.model},
              {"match", c.match},
              {"penalty", c.penalty},
              {"cost_usd", c.cost.usd()},
              {"penalty_or_cost", mode == RoutingMode::objective ? c.penalty : c.cost.usd()},
              {"objective", c.objective},
              {"capped_skills", c.breakdown.capped_skills},
              {"breakdown", to_json(c.breakdown)}};
}

Json to_json(const RoutingDecision& d, RoutingMode mode) {
  Json candidates = Json::array();
  for (const auto& c : d.candidates) candidates.push_back(to_json(c, mode));
  const auto* r = d.runner_up();
  return Json{{"task", d.task},
              {"quality_sensitivity", d.quality_sensitivity},
              {"skew", d.skew},
              {"quality_weight", d.quality_weight},
              {"cost_weight", d.cost_weight},
              {"winner", d.winner().model},
              {"runner_up", r ? Json(r->model) : Json(nullptr)},
              {"margin", d.margin},
              {"decisive_factor", std::string(to_string(d.factor))},
              {"candidates", candidates}};
}

Json to_json(const RoutingResult& r) {
  Json config{{"runs", r.config.runs},
              {"kappa", r.config.kappa},
              {"epsilon", r.config.epsilon},
              {"injected_penalties", r.config.injected_penalties}};
  if (r.config.c_global) config["c_global"] = *r.config.c_global;
  if (r.config.budget) config["budget"] = r.config.budget->usd();
  Json decisions = Json::array();
  for (const auto& d : r.decisions) decisions.push_back(to_json(d, r.config.mode));
  Json doc{{"schema_version", kSchemaVersion},
           {"mode", std::string(to_string(r.config.mode))},
           {"config", config},
           {"decisions", decisions},
           {"totals", {{"cost_usd", r.total_cost.usd()}, {"quality", r.total_quality}}}};
  if (r.dp) {
    doc["dp_table"] = {{"tasks", r.dp->tasks},
                       {"models", r.dp->models},
                       {"columns", r.dp->columns},
                       {"step_usd", r.dp->step.usd()}};
  }
  return doc;
}

Json to_json(std::span<const SweepStep> steps) {
  Json arr = Json::array();
  for (const auto& s : steps) {
    Json changes = Json::array();
    for (const auto& c : s.changes) changes.push_back({{"task", c.task}, {"from", c.from}, {"to", c.to}});
    arr.push_back({{"setting", s.setting}, {"result", to_json(s.result)}, {"changes", changes}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"steps", arr}};
}

namespace {

const Json& field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorKind::validation, fmt::format("routing result: missing field '{}'", key));
  return *it;
}

CandidateScore candidate_from_json(const Json& j, const std::string& task) {
  CandidateScore c;
  c.model = field(j, "model").get<std::string>();
  c.match = field(j, "match").get<double>();
  c.penalty = field(j, "penalty").get<double>();
  c.cost = Money::from_usd(field(j, "cost_usd").get<double>());
  c.objective = field(j, "objective").get<double>();
  const Json& b = field(j, "breakdown");
  c.breakdown.model = c.model;
  c.breakdown.task = task;
  c.breakdown.total = field(b, "total").get<double>();
  c.breakdown.uncapped_total = field(b, "uncapped_total").get<double>();
  for (const auto& s : field(b, "skills")) {
    SkillFulfillment f;
    f.skill = field(s, "skill").get<std::string>();
    f.requirement = field(s, "requirement").get<double>();
    f.capability = field(s, "capability").get<double>();
    f.uncapped_ratio = field(s, "uncapped_ratio").get<double>();
    f.ratio = field(s, "ratio").get<double>();
    f.contribution = field(s, "contribution").get<double>();
    if (f.capped()) c.breakdown.capped_skills.insert(f.skill);
    c.breakdown.skills.push_back(std::move(f));
  }
  return c;
}

}  // namespace

RoutingResult routing_result_from_json(const Json& doc) {
  RoutingResult r;
  const std::string mode = field(doc, "mode").get<std::string>();
  if (mode == "objective") r.config.mode = RoutingMode::objective;
  else if (mode == "budget") r.config.mode = RoutingMode::budget;
  else throw Error(ErrorKind::validation, fmt::format("routing result: unknown mode '{}'", mode));
  const Json& config = field(doc, "config");
  r.config.runs = field(config, "runs").get<std::int64_t>();
  r.config.kappa = field(config, "kappa").get<double>();
  r.config.epsilon = field(config, "epsilon").get<double>();
  r.config.injected_penalties = config.value("injected_penalties", false);
  if (config.contains("c_global")) r.config.c_global = config["c_global"].get<double>();
  if (config.contains("budget")) r.config.budget = Money::from_usd(config["budget"].get<double>());

  for (const auto& dj : field(doc, "decisions")) {
    RoutingDecision d;
    d.task = field(dj, "task").get<std::string>();
    d.quality_sensitivity = field(dj, "quality_sensitivity").get<double>();
    d.skew = field(dj, "skew").get<double>();
    d.quality_weight = field(dj, "quality_weight").get<double>();
    d.cost_weight = field(dj, "cost_weight").get<double>();
    d.margin = field(dj, "margin").get<double>();
    d.factor = decisive_factor_from_string(field(dj, "decisive_factor").get<std::string>());
    for (const auto& cj : field(dj, "candidates")) d.candidates.push_back(candidate_from_json(cj, d.task));
    if (d.candidates.empty())
      throw Error(ErrorKind::incomplete, fmt::format("routing result: task '{}' has no candidates", d.task));
    const std::string winner = field(dj, "winner").get<std::string>();
    const Json& runner = field(dj, "runner_up");
    bool found = false;
    for (std::size_t i = 0; i < d.candidates.size(); ++i) {
      if (d.candidates[i].model == winner) {
        d.winner_index = i;
        found = true;
      }
      if (runner.is_string() && d.candidates[i].model == runner.get<std::string>()) d.runner_up_index = i;
    }
    if (!found)
      throw Error(ErrorKind::validation, fmt::format("routing result: winner '{}' not among candidates", winner));
    r.decisions.push_back(std::move(d));
  }
  const Json& totals = field(doc, "totals");
  r.total_cost = Money::from_usd(field(totals, "cost_usd").get<double>());
  r.total_quality = field(totals, "quality").get<double>();
  if (doc.contains("dp_table")) {
    const Json& dp = doc["dp_table"];
    r.dp = DpSummary{.tasks = field(dp, "tasks").get<std::size_t>(),
                     .models = field(dp, "models").get<std::size_t>(),
                     .columns = field(dp, "columns").get<std::int64_t>(),
                     .step = Money::from_usd(field(dp, "step_usd").get<double>())};
  }
  return r;
}

}  // namespace skillroute
