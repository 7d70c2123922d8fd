#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "survival/model.hpp"
#include "survival/solver.hpp"
#include "survival/taxonomy.hpp"

namespace survival::experiments {

/// R* = max_a E[R(Y_a)], real units.
double optimal_mean_reward(const SurvivalProblem& p);

struct Regret {
    double regret;  // v_t(b) - (T - t + 1) R*
    double rate;    // regret / (T - t + 1)
};

/// Regret of the policy whose values are in v, over the T - t + 1 remaining steps.
Regret regret(const SurvivalProblem& p, const ValueTable& v, int t, Units budget);
Regret regret(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget);

struct GridRow {
    int horizon;
    Units budget;
    double v;
    double surv;
    BehaviorCell behavior;  // first-step decision and its flags
    Regret regret;
};

/// First-step decision, value, behavior flags and regret for every
/// (horizon, initial budget) pair, horizons outermost. Without shaping the
/// problem is time-homogeneous, so a single solve at the largest horizon
/// serves every shorter one through its later rows.
std::vector<GridRow> sweep(const SurvivalProblem& p, const std::vector<int>& horizons,
                           const std::vector<Units>& budgets);

/// CSV: horizon, t, budget, action, v, surv (first step).
void write_policy_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows);
/// CSV: horizon, budget, action, risk_neutral, short_surv, long_surv, risk_seeking, tie.
void write_behavior_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows);
/// CSV: budget, horizon, regret, regret_rate, first_action.
void write_regret_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows);

struct RandomSpec {
    std::size_t n_actions = 10;
    std::size_t n_outcomes = 41;
    std::size_t support_size = 4;
    Units reward_span = 20;
};

struct ScenarioConfig {
    std::string scenario;  // assistant, gambler, random10 or file
    std::vector<int> horizons;
    std::vector<double> budgets;  // real units
    std::vector<std::uint64_t> seeds{0};
    std::filesystem::path output_dir{"."};
    std::filesystem::path problem_path;  // scenario "file"
    RandomSpec random;
};

/// JSON config. "horizons" and "budgets" take either a list or a range
/// object {"from": a, "to": b, "step": s} (step defaults to 1, inclusive).
/// Relative "problem" paths resolve against base_dir.
ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws ProblemError for an unknown scenario or empty grid lists.
void validate_config(const ScenarioConfig& config);

/// The problem a scenario sweeps; `seed` only matters for random10.
SurvivalProblem scenario_problem(const ScenarioConfig& config, std::uint64_t seed);

/// Sweeps every instance of the scenario and writes <name>_policy.csv,
/// <name>_behavior.csv and <name>_regret.csv (plus <name>_problem.json for
/// generated instances) into output_dir. Returns the written paths.
std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& config);

}  // namespace survival::experiments
