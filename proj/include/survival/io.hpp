#pragma once

#include <iosfwd>
#include <string>

#include "survival/alignment.hpp"
#include "survival/model.hpp"

namespace survival::io {

/// Parses a JSON problem document:
///
///   {
///     "granularity": 1,
///     "outcomes": [{"label": "Y_vd", "reward": -100}, ...],
///     "actions": [{"label": "a_e", "probs": {"Y_vd": 0.05, "Y_s": 0.95}}, ...],
///     "initial_budget": 10,
///     "horizon": 5,
///     "shaping": [{"outcomes": ["Y_n"], "bonus": 9, "from_t": 1, "to_t": 1,
///                  "min_budget": 1, "max_budget": 50}]
///   }
///
/// Rewards, budgets and bonuses are real numbers that must lie on the 1/g
/// grid. "granularity" defaults to 1 and "shaping" is optional, as are the
/// window and budget bounds of each shaping entry. Throws ProblemError on
/// malformed input.
RawProblem parse_problem(std::istream& in);
RawProblem parse_problem(const std::string& text);
SurvivalProblem load_problem(const std::string& path);

/// Writes p in the format read by parse_problem, shaping included.
void write_problem(std::ostream& out, const SurvivalProblem& p);
void save_problem(const std::string& path, const SurvivalProblem& p);

/// JSON document with agent and principal values, the gap and the list of
/// divergence cells as [t, budget] pairs in real units.
void write_misalignment(std::ostream& out, const SurvivalProblem& p, const PrincipalReport& report);

/// JSON summary of a shaping search: verdict, boosted action and outcomes,
/// bonus, occupancy and the shaped problem.
void write_shaping(std::ostream& out, const SurvivalProblem& p, const ShapingResult& result);

/// CSV audit of the bonus search: bonus, lifetime_occupancy, action, passed.
void write_shaping_audit_csv(std::ostream& out, const SurvivalProblem& p, const ShapingResult& result);

}  // namespace survival::io
