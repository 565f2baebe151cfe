#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillroute/json_io.hpp"
#include "skillroute/models.hpp"
#include "skillroute/money.hpp"
#include "skillroute/workflow.hpp"

namespace skillroute {

/// Floor on both objective weights so neither term vanishes at the extremes.
inline constexpr double kEpsilon = 0.01;
/// Objectives closer than this are treated as tied.
inline constexpr double kTieTolerance = 1e-9;
inline constexpr std::int64_t kDefaultRuns = 1000;

struct SkillFulfillment {
  std::string skill;
  double requirement = 0.0;     // R
  double capability = 0.0;      // calibrated capability
  double uncapped_ratio = 0.0;  // capability / (complexity * R)
  double ratio = 0.0;           // min(1, uncapped_ratio)
  double contribution = 0.0;    // ratio * R

  bool capped() const { return uncapped_ratio >= 1.0; }
};

struct MatchBreakdown {
  std::string model;
  std::string task;
  std::vector<SkillFulfillment> skills;  // required skills, ordered by id
  double total = 0.0;
  double uncapped_total = 0.0;  // same sum without the min(1, .) clamp
  std::set<std::string> capped_skills;
};

/// Capped skill-fulfillment match of a calibrated profile against a task.
/// Zero-requirement skills are skipped; a required skill missing from the
/// profile is an incomplete-profile error.
MatchBreakdown match_score(const CapabilityProfile& profile, const SubtaskProfile& task);

/// q * max(1 - c, eps) * match - c * max(1 - q, eps) * penalty
double objective_score(double quality_sensitivity, double c_global, double match, double penalty);
double quality_weight(double quality_sensitivity, double c_global);
double cost_weight(double quality_sensitivity, double c_global);

struct CandidateScore {
  std::string model;
  MatchBreakdown breakdown;
  double match = 0.0;
  double penalty = 0.0;  // min-max cost penalty (computed or injected)
  Money cost;            // absolute cost for the configured number of runs
  double objective = 0.0;
};

enum class TieBreakRule { none, uncapped_match, cost, name };

/// Picks a winner among candidates whose objectives are tied: highest uncapped
/// match, then lowest penalty, then lexicographically smallest model name.
/// Returns the index into `tied` and the criterion that separated the winner.
std::pair<std::size_t, TieBreakRule> break_tie(std::span<const CandidateScore> tied);

/// Orders candidates best-first by objective; tied groups resolve via break_tie.
/// The result is independent of input order.
std::vector<CandidateScore> rank_candidates(std::vector<CandidateScore> candidates,
                                            TieBreakRule* winner_rule = nullptr);

enum class DecisiveFactor {
  match_dominant,
  cost_dominant,
  quality_weight_decisive,
  tiebreak_uncapped,
  tiebreak_cost,
  tiebreak_name,
  budget_constrained,
};

std::string_view to_string(DecisiveFactor f);
DecisiveFactor decisive_factor_from_string(std::string_view s);

struct RoutingDecision {
  std::string task;
  double quality_sensitivity = 0.0;  // effective (override-aware)
  double skew = 0.0;
  double quality_weight = 0.0;
  double cost_weight = 0.0;
  std::vector<CandidateScore> candidates;  // ranked best-first by objective
  std::size_t winner_index = 0;
  std::optional<std::size_t> runner_up_index;
  double margin = 0.0;
  DecisiveFactor factor = DecisiveFactor::match_dominant;

  const CandidateScore& winner() const { return candidates.at(winner_index); }
  const CandidateScore* runner_up() const {
    return runner_up_index ? &candidates.at(*runner_up_index) : nullptr;
  }
};

enum class RoutingMode { objective, budget };

std::string_view to_string(RoutingMode mode);

struct RoutingConfig {
  RoutingMode mode = RoutingMode::objective;
  std::optional<double> c_global;
  std::optional<Money> budget;
  std::int64_t runs = kDefaultRuns;
  double kappa = kDefaultKappa;
  double epsilon = kEpsilon;
  bool injected_penalties = false;
};

struct DpSummary {
  std::size_t tasks = 0;
  std::size_t models = 0;
  std::int64_t columns = 0;  // budget cells, one per cent
  Money step = Money::from_cents(1);
};

struct RoutingResult {
  RoutingConfig config;
  std::vector<RoutingDecision> decisions;
  Money total_cost;
  double total_quality = 0.0;  // sum of q_eff * match over assigned models
  std::optional<DpSummary> dp;

  std::vector<std::pair<std::string, std::string>> assignments() const;
  const RoutingDecision* find(const std::string& task) const;
};

/// task -> model -> injected cost penalty.
using PenaltyTable = std::map<std::string, std::map<std::string, double>>;

PenaltyTable load_penalty_table(const std::filesystem::path& path);
PenaltyTable parse_penalty_table(const Json& doc);

struct RoutingInputs {
  Workflow workflow;
  ProfileSet profiles;  // calibrated
  std::vector<ModelRecord> models;
  std::optional<PenaltyTable> injected_penalties;
};

/// Routes each task independently to the argmax of the quality/cost objective.
RoutingResult objective_route(const RoutingInputs& inputs, double c_global, std::int64_t runs = kDefaultRuns);

/// Maximizes total q_eff * match subject to total absolute cost <= budget via
/// a dynamic program over tasks x remaining budget in whole cents. Each task
/// cost is rounded up to the cent inside the table; equal-quality plans
/// resolve to the cheaper one. Throws an infeasible error quoting the
/// cheapest plan when the budget cannot cover it.
RoutingResult budget_route(const RoutingInputs& inputs, Money budget, std::int64_t runs = kDefaultRuns);

/// Per-task, per-model absolute cost in whole cents as used by the budget table.
std::vector<std::vector<std::int64_t>> budget_cost_cents(const RoutingInputs& inputs, std::int64_t runs);

struct AssignmentChange {
  std::string task;
  std::string from;
  std::string to;
};

struct SweepStep {
  double setting = 0.0;  // c_global or budget in USD
  RoutingResult result;
  std::vector<AssignmentChange> changes;  // relative to the previous step
};

std::vector<SweepStep> sweep_cost(const RoutingInputs& inputs, std::span<const double> settings,
                                  std::int64_t runs = kDefaultRuns);
std::vector<SweepStep> sweep_budget(const RoutingInputs& inputs, std::span<const Money> budgets,
                                    std::int64_t runs = kDefaultRuns);

Json to_json(const MatchBreakdown& breakdown);
Json to_json(const CandidateScore& candidate, RoutingMode mode);
Json to_json(const RoutingDecision& decision, RoutingMode mode);
Json to_json(const RoutingResult& result);
Json to_json(std::span<const SweepStep> steps);
RoutingResult routing_result_from_json(const Json& doc);

}  // namespace skillroute
