// survival: command-line front end for the solver, taxonomy, alignment,
// simulation and sweep tools.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "survival/alignment.hpp"
#include "survival/experiments.hpp"
#include "survival/io.hpp"
#include "survival/numeric.hpp"
#include "survival/scenarios.hpp"
#include "survival/sim.hpp"
#include "survival/solver.hpp"
#include "survival/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace survival;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

struct ProblemArgs {
    std::string problem;
    std::string scenario;
    std::optional<int> horizon;
    std::optional<double> budget;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& args) {
    cmd->add_option("--problem", args.problem, "Problem JSON file");
    cmd->add_option("--scenario", args.scenario, "Built-in scenario: assistant, gambler or random10");
    cmd->add_option("--horizon", args.horizon, "Horizon T (overrides the problem)");
    cmd->add_option("--budget", args.budget, "Initial budget in real units (overrides the problem)");
}

// Problem from --problem, --scenario or the first grid point of --config.
SurvivalProblem resolve_problem(const Common& common, const ProblemArgs& args) {
    std::optional<SurvivalProblem> p;
    std::optional<int> horizon = args.horizon;
    std::optional<double> budget = args.budget;
    if (!args.problem.empty()) {
        p = io::load_problem(args.problem);
    } else if (!args.scenario.empty() || !common.config.empty()) {
        experiments::ScenarioConfig c;
        if (!common.config.empty()) c = experiments::load_config(common.config);
        if (!args.scenario.empty()) c.scenario = args.scenario;
        if (c.scenario == "file" && c.problem_path.empty()) throw ProblemError("scenario \"file\" needs --problem");
        const std::uint64_t seed = common.seed_set ? common.seed : (c.seeds.empty() ? 0 : c.seeds.front());
        p = experiments::scenario_problem(c, seed);
        if (!horizon && !c.horizons.empty()) horizon = c.horizons.front();
        if (!budget && !c.budgets.empty()) budget = c.budgets.front();
        if (!horizon && c.scenario == "gambler") horizon = 3;
        if (!budget && (c.scenario == "gambler" || c.scenario == "random10")) budget = 1;
        if (!budget && c.scenario == "assistant") budget = 10;
    } else {
        throw ProblemError("give --problem, --scenario or --config");
    }
    if (horizon) p = p->with_horizon(*horizon);
    if (budget) p = p->with_initial_budget(to_units(*budget, p->granularity(), "budget"));
    return *p;
}

// Writes to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Common& common, const std::string& name, const std::function<void(std::ostream&)>& writer) {
    if (common.out.empty()) {
        writer(std::cout);
        return;
    }
    fs::create_directories(common.out);
    const fs::path path = fs::path(common.out) / name;
    std::ofstream file(path);
    if (!file) throw ProblemError("cannot write " + path.string());
    writer(file);
    std::cerr << "wrote " << path.string() << '\n';
}

std::string label(const SurvivalProblem& p, ActionIndex a) {
    return a == kNoAction ? std::string("none") : p.action(a).label();
}

void print_condition(std::ostream& out, const SurvivalProblem& p, const ConditionReport& r) {
    out << r.condition << " t=" << r.t << " status=" << to_string(r.status);
    if (r.status == ConditionStatus::evaluated) {
        out << " holds=" << r.holds << " verified=" << r.guaranteed_behavior_verified;
    }
    for (const auto& [name, value] : r.quantities) {
        out << ' ' << name << '=';
        if (name.starts_with("a_")) {
            out << label(p, static_cast<ActionIndex>(value));
        } else {
            out << format_real(value);
        }
    }
    if (!r.note.empty()) out << " (" << r.note << ')';
    out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon decision problems under survival constraints"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config, "Scenario config JSON");
    app.add_option("--out", common.out, "Output directory (stdout when omitted)");
    app.add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { common.seed = s, common.seed_set = true; }, "Random seed");

    ProblemArgs solve_args, classify_args, regret_args, shape_args, misalign_args, sim_args;

    auto* solve_cmd = app.add_subcommand("solve", "Solve a problem and export the value/policy table");
    add_problem_options(solve_cmd, solve_args);

    auto* classify_cmd = app.add_subcommand("classify", "Behavior flags and condition checks");
    add_problem_options(classify_cmd, classify_args);
    int classify_t = 1;
    std::optional<double> b_hat;
    classify_cmd->add_option("--t", classify_t, "Step for the condition checks");
    classify_cmd->add_option("--b-hat", b_hat, "Budget bound for the aversion checks (default: initial budget)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario sweep from --config");

    auto* regret_cmd = app.add_subcommand("regret", "Regret of the optimal policy at the initial budget");
    add_problem_options(regret_cmd, regret_args);

    auto* shape_cmd = app.add_subcommand("shape", "Search for a reward shaping that avoids an outcome");
    add_problem_options(shape_cmd, shape_args);
    std::string avoid;
    int shape_t = 1;
    shape_cmd->add_option("--avoid", avoid, "Outcome label to avoid")->required();
    shape_cmd->add_option("--t", shape_t, "Step at which the bonus applies");

    auto* misalign_cmd = app.add_subcommand("misalign", "Principal/agent misalignment report");
    add_problem_options(misalign_cmd, misalign_args);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo rollouts");
    add_problem_options(sim_cmd, sim_args);
    std::size_t n = 10000;
    std::string policy_name = "optimal";
    bool trace = false;
    sim_cmd->add_option("-n,--rollouts", n, "Number of rollouts");
    sim_cmd->add_option("--policy", policy_name, "\"optimal\" or an action label to play at every step");
    sim_cmd->add_flag("--trace", trace, "Also export the trace of the first rollout");

    auto* gen_cmd = app.add_subcommand("gen-random", "Generate a random problem");
    std::size_t n_actions = 10, n_outcomes = 41, support = 4;
    Units span = 20;
    int gen_horizon = 1;
    double gen_budget = 1;
    gen_cmd->add_option("--actions", n_actions, "Number of actions");
    gen_cmd->add_option("--outcomes", n_outcomes, "Number of outcomes (2 * span + 1)");
    gen_cmd->add_option("--support", support, "Support size per action");
    gen_cmd->add_option("--span", span, "Rewards run from -span to span");
    gen_cmd->add_option("--horizon", gen_horizon, "Horizon T");
    gen_cmd->add_option("--budget", gen_budget, "Initial budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd) {
            const auto p = resolve_problem(common, solve_args);
            const auto tables = solve(p);
            emit(common, "tables.csv", [&](std::ostream& o) { write_tables_csv(o, p, tables); });
            if (p.initial_budget() > 0) {
                std::cerr << "v_1(" << format_real(p.to_real(p.initial_budget()))
                          << ") = " << format_real(tables.v(1, p.initial_budget()))
                          << ", first action " << label(p, tables.action(1, p.initial_budget())) << '\n';
            }
        } else if (*classify_cmd) {
            const auto p = resolve_problem(common, classify_args);
            const auto tables = solve(p);
            emit(common, "behavior.csv",
                 [&](std::ostream& o) { write_behavior_csv(o, p, classify_behavior(p, tables)); });
            const Units bh = b_hat ? to_units(*b_hat, p.granularity(), "b-hat") : p.initial_budget();
            auto& out = std::cerr;
            out << "risk-neutral action " << label(p, risk_neutral_action(p).action) << ", optimistic action "
                << label(p, optimistic_action(p).action) << ", risk-neutral budget threshold "
                << format_real(p.to_real(lemma1_threshold(p, classify_t))) << '\n';
            print_condition(out, p, check_short_term_aversion(p, tables, classify_t, bh));
            print_condition(out, p, check_long_term_aversion(p, tables, classify_t, bh));
            if (p.initial_budget() > 0) print_condition(out, p, check_risk_seeking(p, tables, classify_t, p.initial_budget()));
        } else if (*sweep_cmd) {
            if (common.config.empty()) throw ProblemError("sweep needs --config");
            auto c = experiments::load_config(common.config);
            if (!common.out.empty()) c.output_dir = common.out;
            if (common.seed_set) c.seeds = {common.seed};
            for (const auto& f : experiments::run_scenario(c)) std::cout << f.string() << '\n';
        } else if (*regret_cmd) {
            const auto p = resolve_problem(common, regret_args);
            const auto tables = solve(p);
            const auto r = experiments::regret(p, tables, 1, p.initial_budget());
            emit(common, "regret.csv", [&](std::ostream& o) {
                o << "budget,horizon,regret,regret_rate,first_action\n"
                  << format_real(p.to_real(p.initial_budget())) << ',' << p.horizon() << ','
                  << format_real(r.regret) << ',' << format_real(r.rate) << ','
                  << label(p, tables.action(1, p.initial_budget())) << '\n';
            });
        } else if (*shape_cmd) {
            const auto p = resolve_problem(common, shape_args);
            const auto result = find_shaping(p, avoid, shape_t, p.initial_budget());
            emit(common, "shaping.json", [&](std::ostream& o) { io::write_shaping(o, p, result); });
            if (!common.out.empty()) {
                emit(common, "shaping_audit.csv", [&](std::ostream& o) { io::write_shaping_audit_csv(o, p, result); });
                if (result.shaped_problem) {
                    emit(common, "shaped_problem.json",
                         [&](std::ostream& o) { io::write_problem(o, *result.shaped_problem); });
                }
            }
        } else if (*misalign_cmd) {
            const auto p = resolve_problem(common, misalign_args);
            emit(common, "misalignment.json",
                 [&](std::ostream& o) { io::write_misalignment(o, p, misalignment_report(p)); });
        } else if (*sim_cmd) {
            const auto p = resolve_problem(common, sim_args);
            const Policy policy =
                policy_name == "optimal" ? solve(p).policy() : Policy::constant(p, p.action_index(policy_name));
            const auto stats = sim::estimate(p, policy, n, common.seed);
            emit(common, "stats.csv", [&](std::ostream& o) { sim::write_stats_csv(o, stats); });
            if (trace) {
                const auto first = sim::rollout(p, policy, sim::stream_seed(common.seed, 0));
                emit(common, "trace.csv", [&](std::ostream& o) { sim::write_trace_csv(o, p, first); });
            }
        } else if (*gen_cmd) {
            auto p = sim::random_problem(n_actions, n_outcomes, support, span, common.seed);
            p = p.with_horizon(gen_horizon).with_initial_budget(to_units(gen_budget, p.granularity(), "budget"));
            emit(common, "problem.json", [&](std::ostream& o) { io::write_problem(o, p); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
