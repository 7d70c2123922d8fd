#include "survival/sim.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "survival/numeric.hpp"

namespace survival::sim {

namespace {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

OutcomeIndex sample_outcome(const ActionModel& a, double u) {
    double cumulative = 0.0;
    const auto& support = a.support();
    for (const auto& e : support) {
        cumulative += e.probability;
        if (u < cumulative) return e.outcome;
    }
    return support.back().outcome;  // rounding remainder
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ProblemError("Rng::below needs a positive bound");
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    while (true) {
        const std::uint64_t x = next();
        if (x >= limit) return x % n;
    }
}

double Rng::exponential() { return -std::log1p(-uniform()); }

RolloutTrace rollout(const SurvivalProblem& p, const Policy& policy, std::uint64_t seed) {
    RolloutTrace trace;
    trace.seed = seed;
    trace.initial_budget = p.initial_budget();
    Rng rng(seed);
    Units b = p.initial_budget();
    for (int t = 1; t <= p.horizon() && b > 0; ++t) {
        const ActionIndex a = policy.at(t, b);
        if (a == kNoAction || a >= p.num_actions()) {
            throw ProblemError("policy is undefined at visited cell (t=" + std::to_string(t) +
                               ", b=" + std::to_string(b) + ")");
        }
        const OutcomeIndex y = sample_outcome(p.action(a), rng.uniform());
        const Units r = clipped_reward(p.reward(y, t, b), b);
        trace.steps.push_back({t, b, a, y, r, b + r});
        trace.total_principal_return += p.base_reward(y);
        b += r;
        if (b == 0 && t < p.horizon()) trace.terminated_early = true;
    }
    trace.total_clipped_return = b - p.initial_budget();
    return trace;
}

RolloutStats estimate(const SurvivalProblem& p, const Policy& policy, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ProblemError("estimate needs at least one rollout");
    CompensatedSum ret, ret_sq, principal;
    std::size_t survived = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto trace = rollout(p, policy, stream_seed(seed, i));
        const double x = p.to_real(trace.total_clipped_return);
        ret.add(x);
        ret_sq.add(x * x);
        principal.add(p.to_real(trace.total_principal_return));
        if (trace.survived()) ++survived;
    }
    const double dn = static_cast<double>(n);
    RolloutStats s;
    s.n = n;
    s.mean_return = ret.value() / dn;
    if (n > 1) {
        const double var = std::max(0.0, (ret_sq.value() - dn * s.mean_return * s.mean_return) / (dn - 1.0));
        s.std_error = std::sqrt(var / dn);
    }
    s.survival_rate = static_cast<double>(survived) / dn;
    s.survival_std_error = std::sqrt(s.survival_rate * (1.0 - s.survival_rate) / dn);
    s.mean_principal_return = principal.value() / dn;
    return s;
}

SurvivalProblem random_problem(std::size_t n_actions, std::size_t n_outcomes, std::size_t support_size,
                               Units reward_span, std::uint64_t seed, Units initial_budget, int horizon) {
    if (n_actions == 0) throw ProblemError("random_problem needs at least one action");
    if (reward_span < 0 || n_outcomes != static_cast<std::size_t>(2 * reward_span + 1)) {
        throw ProblemError("random_problem needs n_outcomes = 2 * reward_span + 1");
    }
    if (support_size == 0 || support_size > n_outcomes) {
        throw ProblemError("support size must lie in 1..n_outcomes");
    }
    std::vector<Outcome> outcomes;
    for (Units r = -reward_span; r <= reward_span; ++r) outcomes.push_back({"y" + std::to_string(r), r});

    Rng rng(seed);
    std::vector<ActionModel> actions;
    std::vector<OutcomeIndex> deck(n_outcomes);
    for (std::size_t a = 0; a < n_actions; ++a) {
        std::iota(deck.begin(), deck.end(), OutcomeIndex{0});
        // Partial Fisher-Yates: the first support_size slots are a uniform subset.
        for (std::size_t i = 0; i < support_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n_outcomes - i));
            std::swap(deck[i], deck[j]);
        }
        std::vector<double> w(support_size);
        double total = 0.0;
        for (auto& x : w) {
            x = rng.exponential();
            total += x;
        }
        std::vector<SupportEntry> support;
        for (std::size_t i = 0; i < support_size; ++i) support.push_back({deck[i], w[i] / total});
        actions.emplace_back("a" + std::to_string(a + 1), std::move(support), n_outcomes);
    }
    return SurvivalProblem(OutcomeSpace(std::move(outcomes), 1), std::move(actions), initial_budget, horizon);
}

void write_trace_csv(std::ostream& out, const SurvivalProblem& p, const RolloutTrace& trace) {
    out << "step,t,budget_before,action,outcome,clipped_reward,budget_after\n";
    std::size_t step = 1;
    for (const auto& s : trace.steps) {
        out << step++ << ',' << s.t << ',' << format_real(p.to_real(s.budget_before)) << ','
            << p.action(s.action).label() << ',' << p.outcome_space()[s.outcome].label << ','
            << format_real(p.to_real(s.clipped_reward)) << ',' << format_real(p.to_real(s.budget_after)) << '\n';
    }
}

void write_stats_csv(std::ostream& out, const RolloutStats& s) {
    out << "n,mean_return,std_error,survival_rate,survival_std_error,mean_principal_return\n";
    out << s.n << ',' << format_real(s.mean_return) << ',' << format_real(s.std_error) << ','
        << format_real(s.survival_rate) << ',' << format_real(s.survival_std_error) << ','
        << format_real(s.mean_principal_return) << '\n';
}

}  // namespace survival::sim
