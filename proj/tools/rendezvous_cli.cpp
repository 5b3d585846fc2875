// Command-line front end: simulate one cell, reproduce the comparison
// table, the tail study and parameter sweeps, and print closed forms or
// exact oracle values. All output is CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rendezvous/rendezvous.hpp"

namespace {

namespace rx = rendezvous::experiments;

// Flags shared by every plan-driven subcommand. Each one overrides the
// matching plan-file key.
struct PlanFlags {
    std::optional<std::string> config;
    std::optional<std::string> n, p, lambda, q, strategies, peer_p, a_overflow, tail_threshold, values;
    std::optional<std::uint64_t> trials, seed, max_rounds, clock_offset;
    std::optional<unsigned> threads;
    std::optional<std::string> out;

    void attach(CLI::App& cmd, bool with_grid = true, bool with_sweep_values = false) {
        cmd.add_option("--config", config, "Plan file ([grid], [run], [sweep], [output] sections)");
        if (with_grid) {
            cmd.add_option("--n", n, "Channel counts, comma separated");
            cmd.add_option("--p", p, "Open probabilities, comma separated");
            cmd.add_option("--lambda", lambda, "Dynamic factors, comma separated");
            cmd.add_option("--q", q, "Intruder open probabilities, comma separated");
            cmd.add_option("--strategies", strategies, "Strategies: A, B, Btilde, C, random or pairs like A:B");
        }
        cmd.add_option("--peer-p", peer_p, "Strategy A's peer open probability (default: actual)");
        cmd.add_option("--a-overflow", a_overflow, "Strategy A past the open count: renormalize or silent")
            ->check(CLI::IsMember({"renormalize", "silent"}));
        cmd.add_option("--trials", trials, "Trials per cell");
        cmd.add_option("--seed", seed, "Master seed");
        cmd.add_option("--max-rounds", max_rounds, "Round cap per trial");
        cmd.add_option("--offset", clock_offset, "Bob's round-index offset");
        cmd.add_option("--tail-threshold", tail_threshold, "Tail rule, e.g. 3n or 100");
        cmd.add_option("--threads", threads, "Worker threads (0 = all cores)");
        cmd.add_option("--out", out, "Output CSV path (default: stdout)");
        if (with_sweep_values) cmd.add_option("--values", values, "Swept values, comma separated");
    }

    rx::ExperimentPlan resolve(rx::ExperimentPlan plan) const {
        if (config) plan = rx::load_plan(*config, std::move(plan));
        std::string ini;
        auto put = [&ini](const char* key, const std::optional<std::string>& v) {
            if (v) ini += std::string(key) + " = " + *v + "\n";
        };
        ini += "[grid]\n";
        put("n", n);
        put("p", p);
        put("lambda", lambda);
        put("q", q);
        put("strategies", strategies);
        put("peer_p", peer_p);
        put("a_overflow", a_overflow);
        ini += "[run]\n";
        put("tail_threshold", tail_threshold);
        ini += "[sweep]\n";
        put("values", values);
        std::istringstream in(ini);
        plan = rx::parse_plan(in, std::move(plan));
        if (trials) plan.trials = *trials;
        if (seed) plan.seed = *seed;
        if (max_rounds) plan.max_rounds = *max_rounds;
        if (clock_offset) plan.clock_offset = *clock_offset;
        if (threads) plan.threads = *threads;
        if (out) plan.out = *out;
        plan.validate();
        return plan;
    }
};

// Single-scenario parameters for simulate / theory / oracle.
struct CellFlags {
    std::size_t n = 20;
    std::optional<double> p, pa, pb, lambda, lambda_a, lambda_b;
    double q = 1.0;
    bool alternating = false;

    void attach(CLI::App& cmd, bool with_intruder = true) {
        cmd.add_option("--n", n, "Channel count")->capture_default_str();
        cmd.add_option("--p", p, "Open probability of both nodes (default 0.6)");
        cmd.add_option("--pa", pa, "Alice's open probability");
        cmd.add_option("--pb", pb, "Bob's open probability");
        cmd.add_option("--lambda", lambda, "Dynamic factor of both nodes (default 0)");
        cmd.add_option("--lambda-a", lambda_a, "Alice's dynamic factor");
        cmd.add_option("--lambda-b", lambda_b, "Bob's dynamic factor");
        if (with_intruder) {
            cmd.add_option("--q", q, "Intruder open probability")->capture_default_str();
            cmd.add_flag("--alternating", alternating, "Deterministic flip every round instead of Markov dynamics");
        }
    }

    rendezvous::EnvSpec env() const {
        rendezvous::EnvSpec e;
        e.n = n;
        e.p_a = pa.value_or(p.value_or(0.6));
        e.p_b = pb.value_or(p.value_or(0.6));
        e.lambda_a = lambda_a.value_or(lambda.value_or(0.0));
        e.lambda_b = lambda_b.value_or(lambda.value_or(0.0));
        e.intruder_q = q;
        e.dynamics = alternating ? rendezvous::Dynamics::alternating : rendezvous::Dynamics::markov;
        return e;
    }
};

template <typename F>
void emit(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream file(path);
    if (!file) throw rx::PlanError("cannot write '" + path + "'");
    write(file);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-node blind rendezvous simulator for cognitive radio channels"};
    app.require_subcommand(1);

    PlanFlags table_flags, tail_flags, sweep_flags, sim_flags;
    std::string sweep_dim;
    CellFlags sim_cell, theory_cell, oracle_cell;
    std::string sim_strategy = "C";
    std::size_t theory_round = 1;
    double theory_eps = 0.001;
    std::string oracle_strategy = "C";
    std::uint64_t oracle_offset = 0;
    std::optional<double> oracle_peer_p;
    std::string oracle_overflow = "renormalize";
    std::string theory_out, oracle_out;

    auto* simulate = app.add_subcommand("simulate", "Run one cell");
    sim_cell.attach(*simulate);
    simulate->add_option("--strategy", sim_strategy, "Strategy or pair, e.g. C or A:B")->capture_default_str();
    sim_flags.attach(*simulate, false);

    auto* table2 = app.add_subcommand("table2", "Strategy comparison over n, lambda and p");
    table_flags.attach(*table2);
    auto* tail = app.add_subcommand("tail", "Fraction of stable trials with TTR >= 3n");
    tail_flags.attach(*tail);
    auto* sweep = app.add_subcommand("sweep", "One-dimensional parameter sweep");
    sweep->add_option("--dim", sweep_dim, "Swept dimension")->required()->check(CLI::IsMember({"n", "p", "lambda", "q"}));
    sweep_flags.attach(*sweep, true, true);

    auto* theory = app.add_subcommand("theory", "Closed-form probabilities, expectations and bounds");
    theory_cell.attach(*theory, false);
    theory->add_option("--round", theory_round, "Round index for prob_B_round")->capture_default_str();
    theory->add_option("--eps", theory_eps, "Mixing tolerance for the restriction interval")->capture_default_str();
    theory->add_option("--out", theory_out, "Output CSV path (default: stdout)");

    auto* oracle = app.add_subcommand("oracle", "Exact E[TTR] for small instances (n <= 6)");
    oracle_cell.n = 3;
    oracle_cell.attach(*oracle, false);
    oracle->add_option("--strategy", oracle_strategy, "Strategy or pair")->capture_default_str();
    oracle->add_option("--offset", oracle_offset, "Bob's round-index offset")->capture_default_str();
    oracle->add_option("--peer-p", oracle_peer_p, "Strategy A's peer open probability");
    oracle->add_option("--a-overflow", oracle_overflow, "Strategy A past the open count: renormalize or silent")
        ->check(CLI::IsMember({"renormalize", "silent"}))
        ->capture_default_str();
    oracle->add_option("--out", oracle_out, "Output CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            auto plan = sim_flags.resolve(rx::default_table2_plan());
            const auto env = sim_cell.env();
            plan.n_values = {env.n};
            plan.p_values = {env.p_a};
            plan.lambda_values = {env.lambda_a};
            plan.q_values = {env.intruder_q};
            plan.strategies = {rx::parse_plan_strategy(sim_strategy)};
            env.validate();
            const auto row = rx::run_cell({plan.strategies.front(), env}, plan, false);
            emit(plan.out, [&](std::ostream& os) { rx::write_csv(os, "simulate", plan, {row}); });
        } else if (*table2) {
            const auto plan = table_flags.resolve(rx::default_table2_plan());
            const auto rows = rx::run_plan(plan);
            emit(plan.out, [&](std::ostream& os) { rx::write_csv(os, "table2", plan, rows); });
        } else if (*tail) {
            const auto plan = tail_flags.resolve(rx::default_tail_plan());
            const auto rows = rx::tail_study(plan);
            emit(plan.out, [&](std::ostream& os) { rx::write_csv(os, "tail", plan, rows); });
        } else if (*sweep) {
            const auto dim = rx::parse_dimension(sweep_dim);
            const auto plan = sweep_flags.resolve(rx::default_sweep_plan(dim));
            const auto rows = rx::sweep(dim, plan);
            emit(plan.out, [&](std::ostream& os) { rx::write_csv(os, "sweep --dim " + sweep_dim, plan, rows); });
        } else if (*theory) {
            const auto env = theory_cell.env();
            emit(theory_out, [&](std::ostream& os) { rx::write_theory_csv(os, env, theory_round, theory_eps); });
        } else if (*oracle) {
            const auto row = rx::oracle_row(oracle_cell.env(), rx::parse_plan_strategy(oracle_strategy), oracle_offset,
                                            oracle_peer_p, rendezvous::parse_rank_overflow(oracle_overflow));
            emit(oracle_out, [&](std::ostream& os) { rx::write_oracle_csv(os, row); });
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
