#pragma once

#include "survival/model.hpp"

namespace survival::scenarios {

/// Assistant example: outcomes Y_vd, Y_d, Y_n, Y_s with rewards -100, -20,
/// 1, 10 and actions a_o (ask for detail), a_m (moderate), a_e (extreme).
SurvivalProblem assistant(double initial_budget = 10, int horizon = 1);

/// Two-coin gambler: golden pays +/-10 with equal odds, silver pays +1.
/// Outcomes bad, safe, good; actions golden, silver.
SurvivalProblem gambler(double initial_budget = 1, int horizon = 3);

}  // namespace survival::scenarios
