#pragma once

// Config-driven experiment grids and their CSV output.
//
// A plan file holds `key = value` lines in named sections:
//
//   [grid]
//   n = 20, 30, 50
//   p = 0.6, 0.75, 0.9
//   lambda = 0, 0.1, 1
//   q = 1
//   ; "X" runs X on both nodes, "X:Y" gives Alice X and Bob Y
//   strategies = random, A, B, C
//   ; optional: Strategy A's estimate of the peer's p (default: actual)
//   peer_p = 0.6
//   ; Strategy A on a rank past the open count: renormalize or silent
//   a_overflow = renormalize
//   [run]
//   trials = 100000
//   seed = 1
//   max_rounds = 1000000
//   clock_offset = 0
//   ; "<k>n" or an absolute round count
//   tail_threshold = 3n
//   threads = 0
//   [sweep]
//   values = 0.05, 0.1, 0.5, 1
//   [output]
//   path = out.csv
//
// Every cell of a plan runs with the plan's master seed, so cells that
// differ only in an unused parameter reproduce each other exactly.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rendezvous/env_model.hpp"
#include "rendezvous/oracle.hpp"
#include "rendezvous/sim_engine.hpp"
#include "rendezvous/strategies.hpp"
#include "rendezvous/theory.hpp"

namespace rendezvous::experiments {

/// Plan-level validation failure. Cell-level failures never throw; they
/// land in the row's error column.
class PlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SweepDimension { n, p, lambda, q };

inline SweepDimension parse_dimension(std::string_view name) {
    if (name == "n") return SweepDimension::n;
    if (name == "p") return SweepDimension::p;
    if (name == "lambda") return SweepDimension::lambda;
    if (name == "q") return SweepDimension::q;
    throw PlanError("unknown sweep dimension '" + std::string(name) + "' (expected n, p, lambda or q)");
}

inline std::string_view to_string(SweepDimension d) {
    switch (d) {
        case SweepDimension::n: return "n";
        case SweepDimension::p: return "p";
        case SweepDimension::lambda: return "lambda";
        case SweepDimension::q: return "q";
    }
    return "?";
}

/// A strategy per node, as named in a plan ("C" or "A:B").
struct PlanStrategy {
    StrategyKind alice = StrategyKind::C;
    StrategyKind bob = StrategyKind::C;

    [[nodiscard]] std::string label() const {
        if (alice == bob) return std::string(to_string(alice));
        return std::string(to_string(alice)) + ":" + std::string(to_string(bob));
    }

    [[nodiscard]] bool uses(StrategyKind k) const noexcept { return alice == k || bob == k; }

    friend bool operator==(const PlanStrategy&, const PlanStrategy&) = default;
};

inline PlanStrategy parse_plan_strategy(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        const auto k = parse_strategy_kind(text);
        return {k, k};
    }
    return {parse_strategy_kind(text.substr(0, colon)), parse_strategy_kind(text.substr(colon + 1))};
}

/// Tail threshold as a multiple of n ("3n") or an absolute round count.
struct TailRule {
    std::uint64_t multiplier = 3;
    bool per_channel = true;

    [[nodiscard]] std::uint64_t threshold(std::size_t n) const noexcept {
        return per_channel ? multiplier * n : multiplier;
    }

    [[nodiscard]] std::string to_string() const {
        return std::to_string(multiplier) + (per_channel ? "n" : "");
    }

    static TailRule parse(std::string_view text);
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view key, const std::string& text) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    if (!(is >> v) || !(is >> std::ws).eof()) throw PlanError("bad number '" + text + "' for " + std::string(key));
    return v;
}

inline std::uint64_t parse_u64(std::string_view key, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw PlanError("bad integer '" + text + "' for " + std::string(key));
    return v;
}

inline std::string format_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(6) << v;
    return os.str();
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) s += ",";
        s += fmt(xs[i]);
    }
    return s;
}

// CSV fields never contain the separator.
inline std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace detail

inline TailRule TailRule::parse(std::string_view text) {
    auto t = detail::trim(text);
    TailRule rule;
    rule.per_channel = !t.empty() && t.back() == 'n';
    if (rule.per_channel) t.pop_back();
    rule.multiplier = detail::parse_u64("tail_threshold", detail::trim(t));
    return rule;
}

struct ExperimentPlan {
    std::vector<std::size_t> n_values{20, 30, 50};
    std::vector<double> p_values{0.6, 0.75, 0.9};
    std::vector<double> lambda_values{0.0, 0.1, 1.0};
    std::vector<double> q_values{1.0};
    std::vector<PlanStrategy> strategies{{StrategyKind::Random, StrategyKind::Random},
                                         {StrategyKind::A, StrategyKind::A},
                                         {StrategyKind::B, StrategyKind::B},
                                         {StrategyKind::C, StrategyKind::C}};
    /// Strategy A's estimate of the peer's open probability; defaults to the
    /// cell's actual peer p.
    std::optional<double> peer_p;
    RankOverflow a_overflow = RankOverflow::renormalize;
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    std::uint64_t max_rounds = kDefaultMaxRounds;
    std::uint64_t clock_offset = 0;
    TailRule tail;
    unsigned threads = 0;
    /// Explicit values for `sweep`; empty means the dimension's defaults.
    std::vector<double> sweep_values;
    std::string out;

    void validate() const {
        if (n_values.empty() || p_values.empty() || lambda_values.empty() || q_values.empty()) {
            throw PlanError("every grid dimension needs at least one value");
        }
        if (strategies.empty()) throw PlanError("plan lists no strategies");
        if (trials == 0) throw PlanError("trials must be at least 1");
        if (max_rounds == 0) throw PlanError("max_rounds must be at least 1");
        for (auto n : n_values) {
            if (n == 0) throw PlanError("n must be positive");
        }
        for (double p : p_values) {
            if (!(p > 0.0 && p <= 1.0)) throw PlanError("p = " + detail::format_number(p) + " outside (0, 1]");
        }
        for (double q : q_values) {
            if (!(q > 0.0 && q <= 1.0)) throw PlanError("q = " + detail::format_number(q) + " outside (0, 1]");
        }
        for (double l : lambda_values) {
            if (!(l >= 0.0 && l <= 2.0)) throw PlanError("lambda = " + detail::format_number(l) + " outside [0, 2]");
        }
        if (peer_p && !(*peer_p > 0.0 && *peer_p <= 1.0)) throw PlanError("peer_p outside (0, 1]");
    }

    /// Effective configuration as (key, value) lines for the CSV header.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const {
        auto num = [](double v) { return detail::format_number(v); };
        std::vector<std::pair<std::string, std::string>> lines{
            {"grid.n", detail::join(n_values, [](std::size_t v) { return std::to_string(v); })},
            {"grid.p", detail::join(p_values, num)},
            {"grid.lambda", detail::join(lambda_values, num)},
            {"grid.q", detail::join(q_values, num)},
            {"grid.strategies", detail::join(strategies, [](const PlanStrategy& s) { return s.label(); })},
            {"grid.peer_p", peer_p ? num(*peer_p) : std::string("auto")},
            {"grid.a_overflow", std::string(to_string(a_overflow))},
            {"run.trials", std::to_string(trials)},
            {"run.seed", std::to_string(seed)},
            {"run.max_rounds", std::to_string(max_rounds)},
            {"run.clock_offset", std::to_string(clock_offset)},
            {"run.tail_threshold", tail.to_string()},
        };
        if (!sweep_values.empty()) lines.emplace_back("sweep.values", detail::join(sweep_values, num));
        return lines;
    }
};

/// Reads a plan file on top of `base`. Unknown sections or keys are errors.
inline ExperimentPlan parse_plan(std::istream& in, ExperimentPlan plan = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw PlanError(std::string("cannot parse plan: ") + e.what());
    }
    auto numbers = [](std::string_view key, const std::string& v) {
        std::vector<double> out;
        for (const auto& piece : detail::split_list(v)) out.push_back(detail::parse_double(key, piece));
        return out;
    };
    for (const auto& [section, body] : tree) {
        for (const auto& [key, node] : body) {
            const auto value = detail::trim(node.get_value<std::string>());
            const auto full = section + "." + key;
            try {
                if (full == "grid.n") {
                    plan.n_values.clear();
                    for (const auto& piece : detail::split_list(value)) {
                        plan.n_values.push_back(static_cast<std::size_t>(detail::parse_u64(full, piece)));
                    }
                } else if (full == "grid.p") {
                    plan.p_values = numbers(full, value);
                } else if (full == "grid.lambda") {
                    plan.lambda_values = numbers(full, value);
                } else if (full == "grid.q") {
                    plan.q_values = numbers(full, value);
                } else if (full == "grid.strategies") {
                    plan.strategies.clear();
                    for (const auto& piece : detail::split_list(value)) plan.strategies.push_back(parse_plan_strategy(piece));
                } else if (full == "grid.peer_p") {
                    plan.peer_p = value == "auto" ? std::nullopt : std::optional<double>(detail::parse_double(full, value));
                } else if (full == "grid.a_overflow") {
                    plan.a_overflow = parse_rank_overflow(value);
                } else if (full == "run.trials") {
                    plan.trials = detail::parse_u64(full, value);
                } else if (full == "run.seed") {
                    plan.seed = detail::parse_u64(full, value);
                } else if (full == "run.max_rounds") {
                    plan.max_rounds = detail::parse_u64(full, value);
                } else if (full == "run.clock_offset") {
                    plan.clock_offset = detail::parse_u64(full, value);
                } else if (full == "run.tail_threshold") {
                    plan.tail = TailRule::parse(value);
                } else if (full == "run.threads") {
                    plan.threads = static_cast<unsigned>(detail::parse_u64(full, value));
                } else if (full == "sweep.values") {
                    plan.sweep_values = numbers(full, value);
                } else if (full == "output.path") {
                    plan.out = value;
                } else {
                    throw PlanError("unknown plan key '" + full + "'");
                }
            } catch (const PlanError&) {
                throw;
            } catch (const std::exception& e) {
                throw PlanError(full + ": " + e.what());
            }
        }
    }
    return plan;
}

inline ExperimentPlan load_plan(const std::string& path, ExperimentPlan base = {}) {
    std::ifstream in(path);
    if (!in) throw PlanError("cannot open plan file '" + path + "'");
    return parse_plan(in, std::move(base));
}

/// Grid of the stable/independent/slow-dynamic comparison table.
inline ExperimentPlan default_table2_plan() { return {}; }

/// Stable cells for the TTR >= 3n tail study.
inline ExperimentPlan default_tail_plan() {
    ExperimentPlan plan;
    plan.n_values = {20, 30, 50};
    plan.p_values = {0.6};
    plan.lambda_values = {0.0};
    plan.strategies = {{StrategyKind::A, StrategyKind::A},
                       {StrategyKind::C, StrategyKind::C},
                       {StrategyKind::Random, StrategyKind::Random}};
    return plan;
}

/// Base plan for one-dimensional sweeps: n = 30, p = 0.6, A and B on
/// stable cells and C on independent-dynamic cells.
inline ExperimentPlan default_sweep_plan(SweepDimension dim) {
    ExperimentPlan plan;
    plan.n_values = {30};
    plan.p_values = {0.6};
    plan.lambda_values = {0.0, 1.0};
    plan.strategies = {{StrategyKind::A, StrategyKind::A},
                       {StrategyKind::B, StrategyKind::B},
                       {StrategyKind::C, StrategyKind::C}};
    if (dim == SweepDimension::lambda) plan.strategies = {{StrategyKind::C, StrategyKind::C}};
    return plan;
}

inline std::vector<double> default_sweep_values(SweepDimension dim) {
    switch (dim) {
        case SweepDimension::n: return {20, 30, 40, 50, 60, 70, 80, 90, 100};
        case SweepDimension::p: return {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
        case SweepDimension::lambda: return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
        case SweepDimension::q: return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    }
    return {};
}

/// One simulated scenario.
struct Cell {
    PlanStrategy strategy;
    EnvSpec env;
};

struct CellRow {
    Cell cell;
    std::uint64_t clock_offset = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::optional<BatchStats> stats;
    /// Empty on success; otherwise why the cell produced no statistics.
    std::string error;
};

inline TrialConfig make_trial_config(const Cell& cell, const ExperimentPlan& plan) {
    TrialConfig cfg;
    cfg.env = cell.env;
    cfg.alice.kind = cell.strategy.alice;
    cfg.bob.kind = cell.strategy.bob;
    if (cfg.alice.kind == StrategyKind::A) cfg.alice.peer_open_prob = plan.peer_p.value_or(cell.env.p_b);
    if (cfg.bob.kind == StrategyKind::A) cfg.bob.peer_open_prob = plan.peer_p.value_or(cell.env.p_a);
    cfg.alice.overflow = cfg.bob.overflow = plan.a_overflow;
    cfg.clock_offset = plan.clock_offset;
    cfg.max_rounds = plan.max_rounds;
    cfg.seed = plan.seed;
    return cfg;
}

/// Runs one cell. Invalid parameters and batch failures are reported in
/// the row, never thrown.
inline CellRow run_cell(const Cell& cell, const ExperimentPlan& plan, bool skip_c_when_stable = true) {
    CellRow row{cell, plan.clock_offset, plan.trials, plan.seed, std::nullopt, {}};
    try {
        cell.env.validate();
        if (skip_c_when_stable && cell.env.is_stable() && cell.strategy.uses(StrategyKind::C)) {
            row.error = "skipped: strategy C does not apply to stable environments";
            return row;
        }
        const auto cfg = make_trial_config(cell, plan);
        row.stats = run_batch(cfg, plan.trials, plan.tail.threshold(cell.env.n), {plan.threads});
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

namespace detail {

inline Cell make_cell(const PlanStrategy& s, std::size_t n, double p, double lambda, double q) {
    EnvSpec env;
    env.n = n;
    env.p_a = env.p_b = p;
    env.lambda_a = env.lambda_b = lambda;
    env.intruder_q = q;
    return {s, env};
}

}  // namespace detail

/// Expands the grid in order n, lambda, q, p, strategy.
inline std::vector<Cell> expand_grid(const ExperimentPlan& plan) {
    std::vector<Cell> cells;
    for (auto n : plan.n_values)
        for (double lambda : plan.lambda_values)
            for (double q : plan.q_values)
                for (double p : plan.p_values)
                    for (const auto& s : plan.strategies) cells.push_back(detail::make_cell(s, n, p, lambda, q));
    return cells;
}

inline std::vector<CellRow> run_plan(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<CellRow> rows;
    for (const auto& cell : expand_grid(plan)) rows.push_back(run_cell(cell, plan));
    return rows;
}

/// Fraction of stable trials with TTR >= the tail threshold for the
/// stationary strategies; B and Btilde are left out because B always meets
/// within n rounds on a common clock.
inline std::vector<CellRow> tail_study(const ExperimentPlan& plan) {
    plan.validate();
    for (double l : plan.lambda_values) {
        if (l != 0.0) throw PlanError("tail study runs stable cells only (lambda = 0)");
    }
    ExperimentPlan stationary = plan;
    std::erase_if(stationary.strategies, [](const PlanStrategy& s) {
        return s.uses(StrategyKind::B) || s.uses(StrategyKind::BTilde);
    });
    if (stationary.strategies.empty()) throw PlanError("tail study needs at least one of A, C, random");
    std::vector<CellRow> rows;
    for (const auto& cell : expand_grid(stationary)) rows.push_back(run_cell(cell, stationary, false));
    return rows;
}

/// One-dimensional sweep: rows ordered by the swept value, every other
/// dimension taken from the plan's grid. Lambda values outside a cell's
/// valid range are left out.
inline std::vector<CellRow> sweep(SweepDimension dim, const ExperimentPlan& plan) {
    plan.validate();
    const auto values = plan.sweep_values.empty() ? default_sweep_values(dim) : plan.sweep_values;
    std::vector<CellRow> rows;
    for (double v : values) {
        ExperimentPlan cellplan = plan;
        switch (dim) {
            case SweepDimension::n:
                if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
                    throw PlanError("n sweep values must be positive integers");
                }
                cellplan.n_values = {static_cast<std::size_t>(v)};
                break;
            case SweepDimension::p: cellplan.p_values = {v}; break;
            case SweepDimension::lambda: cellplan.lambda_values = {v}; break;
            case SweepDimension::q: cellplan.q_values = {v}; break;
        }
        cellplan.validate();
        for (const auto& cell : expand_grid(cellplan)) {
            if (dim == SweepDimension::lambda && v > max_dynamic_factor(cell.env.p_a) + 1e-12) continue;
            rows.push_back(run_cell(cell, cellplan));
        }
    }
    return rows;
}

inline constexpr std::string_view kCsvHeader =
    "strategy,n,p_a,p_b,lambda_a,lambda_b,q,clock_offset,trials,mean_ttr,std_err,capped_count,frac_ge_3n,seed,error";

inline std::string format_row(const CellRow& r) {
    using detail::format_number;
    const auto& e = r.cell.env;
    std::ostringstream os;
    os << r.cell.strategy.label() << ',' << e.n << ',' << format_number(e.p_a) << ',' << format_number(e.p_b) << ','
       << format_number(e.lambda_a) << ',' << format_number(e.lambda_b) << ',' << format_number(e.intruder_q) << ','
       << r.clock_offset << ',' << r.trials << ',';
    if (r.stats) {
        os << format_number(r.stats->mean_ttr) << ',' << format_number(r.stats->std_err) << ','
           << r.stats->capped_count << ',' << format_number(r.stats->frac_ge_threshold) << ',';
    } else {
        os << ",,,,";
    }
    os << r.seed << ',' << detail::csv_safe(r.error);
    return os.str();
}

/// Config echo as '#' lines, then the header and one line per row.
inline void write_csv(std::ostream& out, std::string_view command, const ExperimentPlan& plan,
                      const std::vector<CellRow>& rows) {
    out << "# command = " << command << '\n';
    for (const auto& [k, v] : plan.echo()) out << "# " << k << " = " << v << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
}

inline std::string to_csv(std::string_view command, const ExperimentPlan& plan, const std::vector<CellRow>& rows) {
    std::ostringstream os;
    write_csv(os, command, plan, rows);
    return os.str();
}

struct TheoryRow {
    std::string name;
    theory::TheoryResult result;
};

/// Every closed form that applies to `env`, in a fixed order. Quantities
/// whose preconditions fail are reported in `skipped` as name: reason.
inline std::vector<TheoryRow> theory_rows(const EnvSpec& env, std::size_t round, double eps,
                                          std::vector<std::string>* skipped = nullptr) {
    using namespace theory;
    env.validate();
    std::vector<TheoryRow> rows;
    auto attempt = [&](const std::string& name, auto&& f) {
        try {
            rows.push_back({name, f()});
        } catch (const std::exception& e) {
            if (skipped) skipped->push_back(name + ": " + e.what());
        }
    };
    attempt("prob_B_round", [&] { return prob_B_round(round, env); });
    attempt("prob_B_round_asymptotic", [&] { return prob_B_round(round, env, Horizon::asymptotic); });
    attempt("expected_ttr_B", [&] { return expected_ttr_B(env); });
    attempt("upper_bound_B", [&] { return upper_bound_B(env); });
    attempt("expected_ttr_C_independent", [&] { return expected_ttr_C_independent(env); });
    attempt("expected_ttr_C_independent_asymptotic",
            [&] { return expected_ttr_C_independent(env, Horizon::asymptotic); });
    attempt("per_round_upper_bound", [&] { return per_round_upper_bound(env); });
    attempt("lower_bound_universal", [&] { return lower_bounds(env).universal; });
    attempt("lower_bound_stationary_stable", [&] { return lower_bounds(env).stationary_stable; });
    attempt("btilde_semi_stable_envelope", [&] { return btilde_semi_stable_envelope(env); });
    attempt("restriction_interval", [&] { return restriction_interval(env, eps).interval; });
    attempt("restriction_envelope_C", [&] { return restriction_interval(env, eps).envelope; });
    return rows;
}

inline void write_theory_csv(std::ostream& out, const EnvSpec& env, std::size_t round, double eps) {
    using detail::format_number;
    std::vector<std::string> skipped;
    const auto rows = theory_rows(env, round, eps, &skipped);
    out << "# n = " << env.n << "\n# p_a = " << format_number(env.p_a) << "\n# p_b = " << format_number(env.p_b)
        << "\n# lambda_a = " << format_number(env.lambda_a) << "\n# lambda_b = " << format_number(env.lambda_b)
        << "\n# round = " << round << "\n# eps = " << format_number(eps) << '\n';
    for (const auto& s : skipped) out << "# skipped " << s << '\n';
    out << "name,value,kind,assumptions\n";
    for (const auto& r : rows) {
        out << r.name << ',' << format_number(r.result.value) << ',' << theory::to_string(r.result.kind) << ','
            << detail::csv_safe(r.result.assumptions) << '\n';
    }
}

struct OracleRow {
    PlanStrategy strategy;
    EnvSpec env;
    std::uint64_t clock_offset = 0;
    std::string method;
    double exact_ttr = 0.0;
    double divergent_mass = 0.0;
};

/// Exact E[TTR]: enumeration for deterministic rules in stable
/// environments, hitting-time solve for stationary rules otherwise.
inline OracleRow oracle_row(const EnvSpec& env, const PlanStrategy& s, std::uint64_t clock_offset = 0,
                            std::optional<double> peer_p = std::nullopt,
                            RankOverflow overflow = RankOverflow::renormalize) {
    StrategyPair pair{{s.alice, std::nullopt, overflow}, {s.bob, std::nullopt, overflow}};
    if (s.alice == StrategyKind::A) pair.alice.peer_open_prob = peer_p.value_or(env.p_b);
    if (s.bob == StrategyKind::A) pair.bob.peer_open_prob = peer_p.value_or(env.p_a);
    OracleRow row{s, env, clock_offset, {}, 0.0, 0.0};
    if (env.is_stable() && is_deterministic(s.alice) && is_deterministic(s.bob)) {
        const auto r = oracle::exact_ttr_stable(env, pair, clock_offset);
        row.method = "enumeration";
        row.exact_ttr = r.expected_ttr;
        row.divergent_mass = r.divergent_mass;
    } else {
        row.method = "hitting_time";
        row.exact_ttr = oracle::exact_ttr_markov(env, pair);
    }
    return row;
}

inline void write_oracle_csv(std::ostream& out, const OracleRow& r) {
    using detail::format_number;
    out << "strategy,n,p_a,p_b,lambda_a,lambda_b,clock_offset,method,exact_ttr,divergent_mass\n";
    const auto& e = r.env;
    out << r.strategy.label() << ',' << e.n << ',' << format_number(e.p_a) << ',' << format_number(e.p_b) << ','
        << format_number(e.lambda_a) << ',' << format_number(e.lambda_b) << ',' << r.clock_offset << ',' << r.method
        << ',' << format_number(r.exact_ttr) << ',' << format_number(r.divergent_mass) << '\n';
}

}  // namespace rendezvous::experiments
