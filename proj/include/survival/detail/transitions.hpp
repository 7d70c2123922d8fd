#pragma once

#include <vector>

#include "survival/model.hpp"

namespace survival::detail {

// Shared by every recursion so that summation order is identical everywhere.

/// Sum over the support, in outcome-index order, of p(y) * clipped reward, in units.
double expected_clipped_units(const SurvivalProblem& p, const ActionModel& action, Units budget, int t);

/// Fills `out` with next budgets in ascending order, merging equal budgets.
void next_budgets(const SurvivalProblem& p, const ActionModel& action, Units budget, int t,
                  std::vector<Transition>& out);

}  // namespace survival::detail
