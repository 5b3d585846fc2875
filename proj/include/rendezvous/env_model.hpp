#pragma once

// Channel-environment models: initial availability, Markov evolution with a
// dynamic factor, the deterministic-flip semi-stable mode, and the static
// intruder mask shared by both nodes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "rendezvous/channel.hpp"

namespace rendezvous {

/// How availability changes between rounds.
enum class Dynamics {
    /// Two-state Markov chain per channel with a0 = lambda(1-p), a1 = lambda p.
    markov,
    /// Initial Bernoulli(p), then every channel flips every round. The
    /// marginal alternates between p and 1-p unless p = 0.5.
    alternating,
};

/// Upper limit of the dynamic factor for open probability p.
inline double max_dynamic_factor(double p) {
    if (p >= 1.0) return 1.0;
    return std::min(1.0 / p, 1.0 / (1.0 - p));
}

namespace detail {
inline constexpr double kParamSlack = 1e-12;

inline void check_probability(double p, const char* name) {
    if (!(p > 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << name << " = " << p << " must lie in (0, 1]";
        throw std::invalid_argument(os.str());
    }
}

inline void check_dynamic_factor(double lambda, double p, const char* name) {
    if (!(lambda >= 0.0) || lambda > max_dynamic_factor(p) + kParamSlack) {
        std::ostringstream os;
        os << name << " = " << lambda << " must lie in [0, " << max_dynamic_factor(p)
           << "] for open probability " << p;
        throw std::invalid_argument(os.str());
    }
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace detail

/// Environment parameters of one rendezvous scenario.
struct EnvSpec {
    std::size_t n = 1;
    double p_a = 1.0;
    double p_b = 1.0;
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    /// Per-channel probability that the intruder leaves a channel usable.
    double intruder_q = 1.0;
    Dynamics dynamics = Dynamics::markov;

    void validate() const {
        if (n == 0) throw std::invalid_argument("channel count n must be positive");
        detail::check_probability(p_a, "p_a");
        detail::check_probability(p_b, "p_b");
        detail::check_probability(intruder_q, "intruder_q");
        if (dynamics == Dynamics::markov) {
            detail::check_dynamic_factor(lambda_a, p_a, "lambda_a");
            detail::check_dynamic_factor(lambda_b, p_b, "lambda_b");
        }
    }

    /// Availability is frozen for both nodes after the first round.
    [[nodiscard]] bool is_stable() const noexcept {
        return dynamics == Dynamics::markov && lambda_a == 0.0 && lambda_b == 0.0;
    }

    /// No node draws randomness when stepping: every channel either keeps,
    /// flips or resets its status. Availability then has period at most 2
    /// from round 2 on.
    [[nodiscard]] bool has_deterministic_dynamics() const noexcept {
        if (dynamics == Dynamics::alternating) return true;
        auto binary = [](double r) { return r == 0.0 || r == 1.0; };
        return binary(a0()) && binary(a1()) && binary(b0()) && binary(b1());
    }

    [[nodiscard]] bool has_intruder() const noexcept { return intruder_q < 1.0; }

    // Transition rates: *0 = open -> closed, *1 = closed -> open.
    [[nodiscard]] double a0() const noexcept { return detail::clamp01(lambda_a * (1.0 - p_a)); }
    [[nodiscard]] double a1() const noexcept { return detail::clamp01(lambda_a * p_a); }
    [[nodiscard]] double b0() const noexcept { return detail::clamp01(lambda_b * (1.0 - p_b)); }
    [[nodiscard]] double b1() const noexcept { return detail::clamp01(lambda_b * p_b); }
};

/// Channels permanently blocked for both nodes during one trial.
struct IntruderMask {
    ChannelVector blocked;

    static IntruderMask none(std::size_t n) { return {ChannelVector(n, false)}; }
    [[nodiscard]] bool is_blocked(ChannelId c) const { return blocked.is_open(c); }
    [[nodiscard]] bool blocks_all() const noexcept { return blocked.open_count() == blocked.size(); }
};

/// Thrown when stable-pair rejection sampling gives up.
class RejectionCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kStablePairRejectionCap = 1'000'000;

template <std::uniform_random_bit_generator Rng>
ChannelVector sample_initial(double p, std::size_t n, Rng& rng) {
    detail::check_probability(p, "p");
    if (n == 0) throw std::invalid_argument("channel count n must be positive");
    ChannelVector v(n);
    std::bernoulli_distribution open(p);
    for (ChannelId c = 1; c <= n; ++c) v.set(c, open(rng));
    return v;
}

/// One Markov step. Open bits close w.p. lambda(1-p), closed bits open w.p.
/// lambda p, independently per channel. lambda = 0 draws nothing.
template <std::uniform_random_bit_generator Rng>
ChannelVector evolve(const ChannelVector& state, double p, double lambda, Rng& rng) {
    detail::check_probability(p, "p");
    detail::check_dynamic_factor(lambda, p, "lambda");
    if (lambda == 0.0) return state;
    std::bernoulli_distribution close(detail::clamp01(lambda * (1.0 - p)));
    std::bernoulli_distribution reopen(detail::clamp01(lambda * p));
    ChannelVector next(state.size());
    for (ChannelId c = 1; c <= state.size(); ++c) {
        next.set(c, state.is_open(c) ? !close(rng) : reopen(rng));
    }
    return next;
}

/// Deterministic semi-stable step: every channel changes status.
inline ChannelVector flip(const ChannelVector& state) {
    ChannelVector next(state.size());
    for (ChannelId c = 1; c <= state.size(); ++c) next.set(c, !state.is_open(c));
    return next;
}

/// Each channel blocked independently w.p. 1-q. q = 1 draws nothing.
template <std::uniform_random_bit_generator Rng>
IntruderMask sample_intruder_mask(std::size_t n, double q, Rng& rng) {
    detail::check_probability(q, "intruder_q");
    if (q >= 1.0) return IntruderMask::none(n);
    IntruderMask mask{ChannelVector(n)};
    std::bernoulli_distribution blocked(1.0 - q);
    for (ChannelId c = 1; c <= n; ++c) mask.blocked.set(c, blocked(rng));
    return mask;
}

inline ChannelVector apply_intruder(const ChannelVector& state, const IntruderMask& mask) {
    if (state.size() != mask.blocked.size()) {
        throw std::logic_error("intruder mask length does not match channel vector");
    }
    ChannelVector out(state.size());
    for (ChannelId c = 1; c <= state.size(); ++c) {
        out.set(c, state.is_open(c) && !mask.is_blocked(c));
    }
    return out;
}

/// Result of rejection-sampling a stable starting configuration.
struct StablePair {
    ChannelVector alice;  ///< after the intruder mask
    ChannelVector bob;    ///< after the intruder mask
    IntruderMask mask;
    std::uint64_t rejections = 0;
};

/// Draws (mask, Alice, Bob) until the masked vectors share an open channel.
/// Every attempt redraws the whole configuration, mask included.
template <std::uniform_random_bit_generator Rng>
StablePair sample_stable_pair(const EnvSpec& env, Rng& rng,
                              std::uint64_t cap = kStablePairRejectionCap) {
    env.validate();
    if (!env.is_stable()) {
        throw std::invalid_argument("sample_stable_pair requires lambda_a = lambda_b = 0");
    }
    for (std::uint64_t rejected = 0; rejected < cap; ++rejected) {
        auto mask = sample_intruder_mask(env.n, env.intruder_q, rng);
        auto a = apply_intruder(sample_initial(env.p_a, env.n, rng), mask);
        auto b = apply_intruder(sample_initial(env.p_b, env.n, rng), mask);
        if (first_common_open(a, b)) {
            return {std::move(a), std::move(b), std::move(mask), rejected};
        }
    }
    std::ostringstream os;
    os << "no common open channel after " << cap << " consecutive draws (n=" << env.n
       << ", p_a=" << env.p_a << ", p_b=" << env.p_b << ", q=" << env.intruder_q << ")";
    throw RejectionCapExceeded(os.str());
}

}  // namespace rendezvous
