#include "survival/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "survival/detail/transitions.hpp"

namespace survival {

OutcomeSpace::OutcomeSpace(std::vector<Outcome> outcomes, Units granularity)
    : outcomes_(std::move(outcomes)), granularity_(granularity) {
    if (granularity_ <= 0) throw ProblemError("granularity must be a positive integer");
    if (outcomes_.empty()) throw ProblemError("outcome list is empty");
    std::set<std::string> seen;
    for (const auto& o : outcomes_) {
        if (!seen.insert(o.label).second) throw ProblemError("duplicate outcome label '" + o.label + "'");
    }
}

std::optional<OutcomeIndex> OutcomeSpace::find(const std::string& label) const {
    for (OutcomeIndex i = 0; i < outcomes_.size(); ++i) {
        if (outcomes_[i].label == label) return i;
    }
    return std::nullopt;
}

OutcomeIndex OutcomeSpace::index_of(const std::string& label) const {
    auto i = find(label);
    if (!i) throw ProblemError("unknown outcome '" + label + "'");
    return *i;
}

Units OutcomeSpace::max_positive_reward() const {
    Units m = 0;
    for (const auto& o : outcomes_) m = std::max(m, o.reward);
    return m;
}

Units OutcomeSpace::max_loss() const {
    Units m = 0;
    for (const auto& o : outcomes_) m = std::max(m, -o.reward);
    return m;
}

Units OutcomeSpace::sup_norm() const {
    Units m = 0;
    for (const auto& o : outcomes_) m = std::max(m, o.reward < 0 ? -o.reward : o.reward);
    return m;
}

ActionModel::ActionModel(std::string label, std::vector<SupportEntry> support, std::size_t n_outcomes)
    : label_(std::move(label)), support_(std::move(support)) {
    std::sort(support_.begin(), support_.end(),
              [](const SupportEntry& a, const SupportEntry& b) { return a.outcome < b.outcome; });
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const auto& e = support_[i];
        if (e.outcome >= n_outcomes) throw ProblemError("action '" + label_ + "' references an invalid outcome");
        if (i > 0 && support_[i - 1].outcome == e.outcome)
            throw ProblemError("action '" + label_ + "' lists an outcome twice");
        if (!(e.probability > 0.0) || e.probability > 1.0)
            throw ProblemError("action '" + label_ + "' has a probability outside (0, 1]");
        total += e.probability;
    }
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
        std::ostringstream msg;
        msg.precision(15);
        msg << "action '" << label_ << "' distribution sums to " << total;
        throw ProblemError(msg.str());
    }
}

double ActionModel::probability(OutcomeIndex y) const {
    for (const auto& e : support_) {
        if (e.outcome == y) return e.probability;
    }
    return 0.0;
}

SurvivalProblem::SurvivalProblem(OutcomeSpace outcomes, std::vector<ActionModel> actions, Units initial_budget,
                                 int horizon, std::vector<ShapingTerm> shaping)
    : outcomes_(std::move(outcomes)),
      actions_(std::move(actions)),
      initial_budget_(initial_budget),
      horizon_(horizon),
      shaping_(std::move(shaping)) {
    if (actions_.empty()) throw ProblemError("action set is empty");
    if (initial_budget_ < 0) throw ProblemError("initial budget is negative");
    if (horizon_ < 1) throw ProblemError("horizon must be a positive integer");
    std::set<std::string> seen;
    for (const auto& a : actions_) {
        if (!seen.insert(a.label()).second) throw ProblemError("duplicate action label '" + a.label() + "'");
    }
    for (const auto& s : shaping_) {
        if (s.outcome >= outcomes_.size()) throw ProblemError("shaping term references an invalid outcome");
        if (s.from_t > s.to_t) throw ProblemError("shaping term has an empty time window");
    }
}

const ActionModel& SurvivalProblem::action(ActionIndex a) const {
    if (a >= actions_.size()) throw ProblemError("unknown action index " + std::to_string(a));
    return actions_[a];
}

std::optional<ActionIndex> SurvivalProblem::find_action(const std::string& label) const {
    for (ActionIndex a = 0; a < actions_.size(); ++a) {
        if (actions_[a].label() == label) return a;
    }
    return std::nullopt;
}

ActionIndex SurvivalProblem::action_index(const std::string& label) const {
    auto a = find_action(label);
    if (!a) throw ProblemError("unknown action '" + label + "'");
    return *a;
}

Units SurvivalProblem::reward(OutcomeIndex y, int t, Units b) const {
    Units r = outcomes_[y].reward;
    for (const auto& s : shaping_) {
        if (s.applies(y, t, b)) r += s.bonus;
    }
    return r;
}

Units SurvivalProblem::max_positive_reward_at(int t) const {
    Units m = 0;
    for (OutcomeIndex y = 0; y < outcomes_.size(); ++y) {
        Units r = outcomes_[y].reward;
        for (const auto& s : shaping_) {
            if (s.outcome == y && t >= s.from_t && t <= s.to_t && s.bonus > 0) r += s.bonus;
        }
        m = std::max(m, r);
    }
    return m;
}

double SurvivalProblem::expected_reward(ActionIndex a) const {
    double sum = 0.0;
    for (const auto& e : action(a).support()) sum += e.probability * static_cast<double>(base_reward(e.outcome));
    return sum / static_cast<double>(granularity());
}

bool SurvivalProblem::has_nonnegative_action() const {
    for (ActionIndex a = 0; a < actions_.size(); ++a) {
        if (expected_reward(a) >= 0.0) return true;
    }
    return false;
}

SurvivalProblem SurvivalProblem::with_initial_budget(Units b0) const {
    return SurvivalProblem(outcomes_, actions_, b0, horizon_, shaping_);
}

SurvivalProblem SurvivalProblem::with_horizon(int horizon) const {
    return SurvivalProblem(outcomes_, actions_, initial_budget_, horizon, shaping_);
}

SurvivalProblem SurvivalProblem::with_shaping(std::vector<ShapingTerm> shaping) const {
    return SurvivalProblem(outcomes_, actions_, initial_budget_, horizon_, std::move(shaping));
}

SurvivalProblem SurvivalProblem::with_reward(OutcomeIndex y, Units reward) const {
    auto outcomes = outcomes_.outcomes();
    outcomes.at(y).reward = reward;
    return SurvivalProblem(OutcomeSpace(std::move(outcomes), granularity()), actions_, initial_budget_, horizon_,
                           shaping_);
}

SurvivalProblem SurvivalProblem::without_action(ActionIndex a) const {
    if (a >= actions_.size()) throw ProblemError("unknown action index " + std::to_string(a));
    auto actions = actions_;
    actions.erase(actions.begin() + static_cast<std::ptrdiff_t>(a));
    return SurvivalProblem(outcomes_, std::move(actions), initial_budget_, horizon_, shaping_);
}

Units to_units(double value, Units granularity, const std::string& what) {
    if (!std::isfinite(value)) throw ProblemError(what + " is not finite");
    const double scaled = value * static_cast<double>(granularity);
    const double rounded = std::round(scaled);
    if (std::abs(value - rounded / static_cast<double>(granularity)) > kRewardGridTolerance) {
        std::ostringstream msg;
        msg.precision(15);
        msg << what << " " << value << " is not representable with granularity " << granularity;
        throw ProblemError(msg.str());
    }
    return static_cast<Units>(rounded);
}

SurvivalProblem validate_problem(const RawProblem& raw) {
    if (raw.granularity <= 0) throw ProblemError("granularity must be a positive integer");
    const Units g = raw.granularity;
    if (raw.outcomes.empty()) throw ProblemError("outcome list is empty");
    if (raw.actions.empty()) throw ProblemError("action set is empty");
    if (raw.horizon < 1 || raw.horizon > std::numeric_limits<int>::max())
        throw ProblemError("horizon must be a positive integer");
    if (raw.initial_budget < 0.0) throw ProblemError("initial budget is negative");

    std::vector<Outcome> outcomes;
    outcomes.reserve(raw.outcomes.size());
    for (const auto& o : raw.outcomes) {
        outcomes.push_back({o.label, to_units(o.reward, g, "reward of '" + o.label + "'")});
    }
    OutcomeSpace space(std::move(outcomes), g);

    std::vector<ActionModel> actions;
    for (const auto& a : raw.actions) {
        std::vector<SupportEntry> support;
        double total = 0.0;
        for (const auto& [label, prob] : a.probs) {
            if (!(prob >= 0.0) || prob > 1.0)
                throw ProblemError("action '" + a.label + "' has probability outside [0, 1] for '" + label + "'");
            total += prob;
            const auto y = space.find(label);
            if (!y) throw ProblemError("action '" + a.label + "' references unknown outcome '" + label + "'");
            if (prob > 0.0) support.push_back({*y, prob});
        }
        if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
            std::ostringstream msg;
            msg.precision(15);
            msg << "action '" << a.label << "' distribution sums to " << total;
            throw ProblemError(msg.str());
        }
        actions.emplace_back(a.label, std::move(support), space.size());
    }

    std::vector<ShapingTerm> shaping;
    for (const auto& s : raw.shaping) {
        const Units bonus = to_units(s.bonus, g, "shaping bonus");
        for (const auto& label : s.outcomes) {
            ShapingTerm term;
            term.outcome = space.index_of(label);
            term.bonus = bonus;
            term.from_t = s.from_t;
            if (s.to_t) term.to_t = *s.to_t;
            if (s.min_budget) term.min_budget = to_units(*s.min_budget, g, "shaping min_budget");
            if (s.max_budget) term.max_budget = to_units(*s.max_budget, g, "shaping max_budget");
            shaping.push_back(term);
        }
    }

    return SurvivalProblem(std::move(space), std::move(actions), to_units(raw.initial_budget, g, "initial budget"),
                           static_cast<int>(raw.horizon), std::move(shaping));
}

double expected_clipped_reward(const SurvivalProblem& p, ActionIndex a, Units budget, int t) {
    if (budget < 0) throw ProblemError("budget is negative");
    return detail::expected_clipped_units(p, p.action(a), budget, t) / static_cast<double>(p.granularity());
}

double optimistic_reward(const SurvivalProblem& p, ActionIndex a) {
    double sum = 0.0;
    for (const auto& e : p.action(a).support()) {
        const Units r = p.base_reward(e.outcome);
        if (r >= 0) sum += e.probability * static_cast<double>(r);
    }
    return sum / static_cast<double>(p.granularity());
}

double desired_probability(const SurvivalProblem& p, ActionIndex a) {
    double sum = 0.0;
    for (const auto& e : p.action(a).support()) {
        if (p.base_reward(e.outcome) >= 0) sum += e.probability;
    }
    return sum;
}

double one_step_survival(const SurvivalProblem& p, ActionIndex a, Units budget, int t) {
    if (budget <= 0) throw ProblemError("one-step survival is undefined at budget 0: the agent has stopped");
    double sum = 0.0;
    for (const auto& e : p.action(a).support()) {
        if (p.reward(e.outcome, t, budget) > -budget) sum += e.probability;
    }
    return sum;
}

BudgetLattice build_budget_lattice(const SurvivalProblem& p) {
    Units top = p.initial_budget();
    for (int t = 1; t <= p.horizon(); ++t) top += p.max_positive_reward_at(t);
    return BudgetLattice(top);
}

std::vector<Transition> transition_distribution(const SurvivalProblem& p, Units budget, ActionIndex a, int t) {
    if (budget <= 0) throw ProblemError("no transitions out of budget 0: the agent has stopped");
    std::vector<Transition> out;
    detail::next_budgets(p, p.action(a), budget, t, out);
    return out;
}

namespace detail {

double expected_clipped_units(const SurvivalProblem& p, const ActionModel& action, Units budget, int t) {
    if (budget <= 0) return 0.0;
    double sum = 0.0;
    for (const auto& e : action.support()) {
        sum += e.probability * static_cast<double>(clipped_reward(p.reward(e.outcome, t, budget), budget));
    }
    return sum;
}

void next_budgets(const SurvivalProblem& p, const ActionModel& action, Units budget, int t,
                  std::vector<Transition>& out) {
    out.clear();
    for (const auto& e : action.support()) {
        const Units next = budget + clipped_reward(p.reward(e.outcome, t, budget), budget);
        // Insertion keeps the list sorted; supports are small.
        auto it = std::lower_bound(out.begin(), out.end(), next,
                                   [](const Transition& tr, Units b) { return tr.budget < b; });
        if (it != out.end() && it->budget == next) {
            it->mass += e.probability;
        } else {
            out.insert(it, Transition{next, e.probability});
        }
    }
}

}  // namespace detail

}  // namespace survival
