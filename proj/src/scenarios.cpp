#include "survival/scenarios.hpp"

namespace survival::scenarios {

SurvivalProblem assistant(double initial_budget, int horizon) {
    RawProblem raw;
    raw.granularity = 1;
    raw.outcomes = {{"Y_vd", -100}, {"Y_d", -20}, {"Y_n", 1}, {"Y_s", 10}};
    raw.actions = {
        {"a_o", {{"Y_n", 1.0}}},
        {"a_m", {{"Y_d", 0.1}, {"Y_s", 0.9}}},
        {"a_e", {{"Y_vd", 0.05}, {"Y_s", 0.95}}},
    };
    raw.initial_budget = initial_budget;
    raw.horizon = horizon;
    return validate_problem(raw);
}

SurvivalProblem gambler(double initial_budget, int horizon) {
    RawProblem raw;
    raw.granularity = 1;
    raw.outcomes = {{"bad", -10}, {"safe", 1}, {"good", 10}};
    raw.actions = {
        {"golden", {{"bad", 0.5}, {"good", 0.5}}},
        {"silver", {{"safe", 1.0}}},
    };
    raw.initial_budget = initial_budget;
    raw.horizon = horizon;
    return validate_problem(raw);
}

}  // namespace survival::scenarios
