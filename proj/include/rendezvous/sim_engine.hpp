#pragma once

// Round-by-round rendezvous trials and Monte Carlo batches.
//
// Seeding: trial i of a batch with master seed S runs on
// std::mt19937_64(derive_trial_seed(S, i)), where derive_trial_seed is the
// SplitMix64 finalizer applied to S + (i + 1) * 0x9E3779B97F4A7C15. A trial
// is a pure function of its TrialConfig, so batches give bit-identical
// results for any worker count.
//
// Aggregation: workers accumulate integer sums only (count, sum of TTR, sum
// of squared TTR, tail hits, rounds). Integer addition is associative and
// commutative, so BatchStats does not depend on completion order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "rendezvous/channel.hpp"
#include "rendezvous/env_model.hpp"
#include "rendezvous/strategies.hpp"

namespace rendezvous {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kDefaultMaxRounds = 1'000'000;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + index * 0x9E3779B97F4A7C15ULL);
}

struct TrialConfig {
    EnvSpec env;
    StrategySpec alice;
    StrategySpec bob;
    /// Bob acts at round index t + clock_offset while Alice acts at t.
    std::uint64_t clock_offset = 0;
    std::uint64_t max_rounds = kDefaultMaxRounds;
    std::uint64_t seed = 0;
    /// Fixed round-1 availability (Alice, Bob) before the intruder mask.
    /// Replaces initial sampling, including the stable common-channel check.
    std::optional<std::pair<ChannelVector, ChannelVector>> initial_state;

    void validate() const {
        env.validate();
        alice.validate();
        bob.validate();
        if (max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");
        if (initial_state && (initial_state->first.size() != env.n || initial_state->second.size() != env.n)) {
            throw std::invalid_argument("initial_state length does not match n");
        }
    }
};

struct TrialOutcome {
    /// Round of the first rendezvous; nullopt when the trial was capped.
    std::optional<std::uint64_t> ttr;
    Selection rendezvous_channel;
    std::uint64_t rounds_with_no_common_channel = 0;
    /// Rounds actually played. Equals ttr on success; on a capped trial it
    /// may stop short of max_rounds once a meeting has become impossible.
    std::uint64_t rounds_simulated = 0;
    /// Lowest channel open for both nodes in round 1.
    Selection first_common_channel;

    [[nodiscard]] bool capped() const noexcept { return !ttr.has_value(); }
};

namespace detail {

inline ChannelVector step_availability(const ChannelVector& state, const EnvSpec& env, double p, double lambda,
                                       Engine& rng) {
    if (env.dynamics == Dynamics::alternating) return flip(state);
    return evolve(state, p, lambda, rng);
}

// True when no later round can produce a rendezvous.
inline bool meeting_impossible(const TrialConfig& cfg, const IntruderMask& mask, std::uint64_t next_round) {
    if (cfg.env.has_intruder() && mask.blocks_all()) return true;
    const auto n = cfg.env.n;
    auto window_passed = [n](StrategyKind kind, std::uint64_t round) {
        return !is_stationary(kind) && window_start(kind, round) > n;
    };
    if (window_passed(cfg.alice.kind, next_round) || window_passed(cfg.bob.kind, next_round + cfg.clock_offset)) {
        return true;
    }
    // Round-independent deterministic rules on availability that cycles
    // through rounds already played.
    if (cfg.alice.kind != StrategyKind::C || cfg.bob.kind != StrategyKind::C) return false;
    if (cfg.env.is_stable()) return true;
    return cfg.env.has_deterministic_dynamics() && next_round > 3;
}

}  // namespace detail

/// What a round looked like, for observers.
struct RoundView {
    std::uint64_t round;
    const ChannelVector& alice;  ///< after the intruder mask
    const ChannelVector& bob;    ///< after the intruder mask
    Selection pick_a;
    Selection pick_b;
};

struct NoObserver {
    void operator()(const RoundView&) const noexcept {}
};

/// Runs one trial until rendezvous or max_rounds. `on_round` sees every
/// played round.
template <typename Observer = NoObserver>
TrialOutcome run_trial(const TrialConfig& cfg, Observer&& on_round = {}) {
    cfg.validate();
    const auto& env = cfg.env;
    Engine rng(cfg.seed);

    ChannelVector raw_a;
    ChannelVector raw_b;
    ChannelVector alice;
    ChannelVector bob;
    IntruderMask mask;
    const bool stable = env.is_stable();
    if (cfg.initial_state) {
        mask = sample_intruder_mask(env.n, env.intruder_q, rng);
        raw_a = cfg.initial_state->first;
        raw_b = cfg.initial_state->second;
        alice = apply_intruder(raw_a, mask);
        bob = apply_intruder(raw_b, mask);
    } else if (stable) {
        auto pair = sample_stable_pair(env, rng);
        alice = std::move(pair.alice);
        bob = std::move(pair.bob);
        mask = std::move(pair.mask);
    } else {
        mask = sample_intruder_mask(env.n, env.intruder_q, rng);
        raw_a = sample_initial(env.p_a, env.n, rng);
        raw_b = sample_initial(env.p_b, env.n, rng);
    }

    TrialOutcome out;
    for (std::uint64_t t = 1; t <= cfg.max_rounds; ++t) {
        if (!stable && (t > 1 || !cfg.initial_state)) {
            if (t > 1) {
                raw_a = detail::step_availability(raw_a, env, env.p_a, env.lambda_a, rng);
                raw_b = detail::step_availability(raw_b, env, env.p_b, env.lambda_b, rng);
            }
            alice = env.has_intruder() ? apply_intruder(raw_a, mask) : raw_a;
            bob = env.has_intruder() ? apply_intruder(raw_b, mask) : raw_b;
        }
        out.rounds_simulated = t;
        const auto common = first_common_open(alice, bob);
        if (!common) ++out.rounds_with_no_common_channel;
        if (t == 1) out.first_common_channel = common;

        const auto pick_a = choose(cfg.alice, alice, t, rng);
        const auto pick_b = choose(cfg.bob, bob, t + cfg.clock_offset, rng);
        on_round(RoundView{t, alice, bob, pick_a, pick_b});
        if (pick_a && pick_a == pick_b) {
            out.ttr = t;
            out.rendezvous_channel = pick_a;
            return out;
        }
        if (detail::meeting_impossible(cfg, mask, t + 1)) break;
    }
    return out;
}

struct BatchStats {
    std::uint64_t trials = 0;
    std::uint64_t capped_count = 0;
    /// Mean and standard error over non-capped trials.
    double mean_ttr = 0.0;
    double std_err = 0.0;
    std::uint64_t tail_threshold = 0;
    /// Fraction of all trials with TTR >= tail_threshold; capped trials count.
    double frac_ge_threshold = 0.0;
    /// Rounds played over all trials, capped ones included.
    std::uint64_t total_rounds = 0;

    [[nodiscard]] std::uint64_t rendezvous_count() const noexcept { return trials - capped_count; }

    /// Empirical per-round success frequency: rendezvous / rounds played.
    [[nodiscard]] double per_round_success() const noexcept {
        return total_rounds == 0 ? 0.0 : static_cast<double>(rendezvous_count()) / static_cast<double>(total_rounds);
    }

    friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

struct BatchOptions {
    /// 0 = std::thread::hardware_concurrency().
    unsigned threads = 0;
};

namespace detail {

struct BatchAccumulator {
    std::uint64_t trials = 0;
    std::uint64_t capped = 0;
    std::uint64_t sum = 0;
    __extension__ unsigned __int128 sum_sq = 0;
    std::uint64_t tail_hits = 0;
    std::uint64_t rounds = 0;

    void add(const TrialOutcome& o, std::uint64_t threshold) {
        ++trials;
        rounds += o.rounds_simulated;
        if (o.capped()) {
            ++capped;
            ++tail_hits;
            return;
        }
        const auto t = *o.ttr;
        sum += t;
        sum_sq += static_cast<unsigned __int128>(t) * t;
        if (t >= threshold) ++tail_hits;
    }

    void merge(const BatchAccumulator& o) {
        trials += o.trials;
        capped += o.capped;
        sum += o.sum;
        sum_sq += o.sum_sq;
        tail_hits += o.tail_hits;
        rounds += o.rounds;
    }

    [[nodiscard]] BatchStats finish(std::uint64_t threshold) const {
        BatchStats s;
        s.trials = trials;
        s.capped_count = capped;
        s.tail_threshold = threshold;
        s.total_rounds = rounds;
        s.frac_ge_threshold = trials == 0 ? 0.0 : static_cast<double>(tail_hits) / static_cast<double>(trials);
        const auto ok = trials - capped;
        if (ok > 0) {
            const long double mean = static_cast<long double>(sum) / ok;
            s.mean_ttr = static_cast<double>(mean);
            if (ok > 1) {
                const long double ss = static_cast<long double>(sum_sq) - mean * static_cast<long double>(sum);
                const long double var = std::max(ss, 0.0L) / (ok - 1);
                s.std_err = static_cast<double>(std::sqrt(var / ok));
            }
        }
        return s;
    }
};

}  // namespace detail

/// Config of trial `index` within a batch seeded by cfg.seed.
inline TrialConfig trial_config(const TrialConfig& cfg, std::uint64_t index) {
    TrialConfig c = cfg;
    c.seed = derive_trial_seed(cfg.seed, index);
    return c;
}

/// Runs `trials` independent trials. Errors from any trial (for example a
/// stable-pair rejection cap) are rethrown; the lowest failing trial wins.
inline BatchStats run_batch(const TrialConfig& cfg, std::uint64_t trials, std::uint64_t tail_threshold,
                            BatchOptions opts = {}) {
    cfg.validate();
    if (trials == 0) throw std::invalid_argument("a batch needs at least one trial");

    unsigned workers = opts.threads != 0 ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

    std::vector<detail::BatchAccumulator> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::uint64_t> error_index(workers, std::numeric_limits<std::uint64_t>::max());

    auto work = [&](unsigned w) {
        const std::uint64_t begin = trials * w / workers;
        const std::uint64_t end = trials * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) {
            try {
                partial[w].add(run_trial(trial_config(cfg, i)), tail_threshold);
            } catch (...) {
                errors[w] = std::current_exception();
                error_index[w] = i;
                return;
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    const auto first_error = std::min_element(error_index.begin(), error_index.end());
    if (*first_error != std::numeric_limits<std::uint64_t>::max()) {
        std::rethrow_exception(errors[static_cast<std::size_t>(first_error - error_index.begin())]);
    }

    detail::BatchAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return total.finish(tail_threshold);
}

}  // namespace rendezvous
