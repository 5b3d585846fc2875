#pragma once

// Closed-form per-round probabilities, expected TTRs and bounds for the
// two-node rendezvous model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rendezvous/env_model.hpp"

namespace rendezvous::theory {

enum class Kind { per_round_prob, expected_ttr, lower_bound, upper_bound, restriction_interval };

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::per_round_prob: return "per_round_prob";
        case Kind::expected_ttr: return "expected_ttr";
        case Kind::lower_bound: return "lower_bound";
        case Kind::upper_bound: return "upper_bound";
        case Kind::restriction_interval: return "restriction_interval";
    }
    return "?";
}

/// Finite number of channels, or the n -> infinity limit.
enum class Horizon { finite, asymptotic };

struct TheoryResult {
    double value = 0.0;
    Kind kind = Kind::expected_ttr;
    std::string assumptions;
};

namespace detail {

// (1-p_a)(1-p_b): probability that a given channel is not open for both
// first-open scans to stop on it.
inline double both_skip(const EnvSpec& env) { return (1.0 - env.p_a) * (1.0 - env.p_b); }

// p_a p_b (1 - r^terms) / (1 - r) with r = (1-p_a)(1-p_b).
inline double geometric_meeting_sum(const EnvSpec& env, double terms) {
    const double r = both_skip(env);
    return env.p_a * env.p_b * (1.0 - std::pow(r, terms)) / (1.0 - r);
}

inline double asymptotic_meeting_prob(const EnvSpec& env) {
    return env.p_a * env.p_b / (env.p_a + env.p_b - env.p_a * env.p_b);
}

}  // namespace detail

/// Probability that Strategy B meets in round i of a stable environment.
inline TheoryResult prob_B_round(std::size_t i, const EnvSpec& env, Horizon h = Horizon::finite) {
    env.validate();
    if (h == Horizon::asymptotic) {
        return {detail::asymptotic_meeting_prob(env), Kind::per_round_prob, "stable, n->inf"};
    }
    if (i < 1 || i > env.n) {
        std::ostringstream os;
        os << "round " << i << " outside 1.." << env.n;
        throw std::invalid_argument(os.str());
    }
    return {detail::geometric_meeting_sum(env, static_cast<double>(env.n - i + 1)), Kind::per_round_prob,
            "stable, finite n"};
}

/// Expected TTR of Strategy B in a stable environment, n -> infinity. Finite-n
/// simulated means sit somewhat above this.
inline TheoryResult expected_ttr_B(const EnvSpec& env) {
    env.validate();
    return {(env.p_a + env.p_b - env.p_a * env.p_b) / (env.p_a * env.p_b), Kind::expected_ttr,
            "stable, synchronous, n->inf (asymptotic estimate)"};
}

/// Strategy B's 2-approximation guarantee (2 - max p) / min p.
inline TheoryResult upper_bound_B(const EnvSpec& env) {
    env.validate();
    return {(2.0 - std::max(env.p_a, env.p_b)) / std::min(env.p_a, env.p_b), Kind::upper_bound,
            "stable, synchronous, n->inf"};
}

/// Strategy C under independent dynamics (lambda = 1): every round is a
/// fresh draw, so E[TTR] is the reciprocal of the per-round probability.
inline TheoryResult expected_ttr_C_independent(const EnvSpec& env, Horizon h = Horizon::finite) {
    env.validate();
    if (h == Horizon::asymptotic) {
        return {1.0 / env.p_a + 1.0 / env.p_b - 1.0, Kind::expected_ttr, "independent dynamic, n->inf"};
    }
    return {1.0 / detail::geometric_meeting_sum(env, static_cast<double>(env.n)), Kind::expected_ttr,
            "independent dynamic, finite n"};
}

/// Highest per-round rendezvous probability any strategy can reach under
/// independent dynamics. Evaluated as the explicit n-term sum.
inline TheoryResult per_round_upper_bound(const EnvSpec& env) {
    env.validate();
    const double r = detail::both_skip(env);
    double term = env.p_a * env.p_b;
    double sum = 0.0;
    for (std::size_t i = 1; i <= env.n; ++i) {
        sum += term;
        term *= r;
    }
    return {sum, Kind::upper_bound, "independent dynamic, any strategy, per round"};
}

struct LowerBounds {
    /// 1 / min(p_a, p_b); holds for every strategy.
    TheoryResult universal;
    /// 1 / (p_a p_b); scale of the stationary-strategy bound in stable
    /// environments (constant factor not included).
    TheoryResult stationary_stable;
};

inline LowerBounds lower_bounds(const EnvSpec& env) {
    env.validate();
    return {{1.0 / std::min(env.p_a, env.p_b), Kind::lower_bound, "any strategy"},
            {1.0 / (env.p_a * env.p_b), Kind::lower_bound, "stationary strategy, stable, up to a constant"}};
}

/// Strategy Btilde in the semi-stable environment: within 4x of
/// expected_ttr_B. No closed form for its expectation is available.
inline TheoryResult btilde_semi_stable_envelope(const EnvSpec& env) {
    return {4.0 * expected_ttr_B(env).value, Kind::upper_bound, "semi-stable, synchronous, n->inf, 4x envelope"};
}

struct RestrictionInterval {
    /// Spacing R between sampled rounds after which every channel's open
    /// probability is within eps * p of p, given any earlier status.
    TheoryResult interval;
    /// R * (1/p_a + 1/p_b - 1): order-of-magnitude envelope on Strategy C's
    /// expected TTR. Constants of the underlying O() are not included.
    TheoryResult envelope;
};

inline RestrictionInterval restriction_interval(const EnvSpec& env, double eps = 0.001) {
    env.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    auto node_interval = [eps](double p, double lambda, const char* who) {
        if (lambda == 0.0 || lambda == 2.0) {
            std::ostringstream os;
            os << "lambda_" << who << " = " << lambda << " gives a chain that never mixes";
            throw std::invalid_argument(os.str());
        }
        if (lambda == 1.0) return 1.0;
        // Deviation from p after R steps decays as |1 - lambda|^R.
        return std::log(1.0 / (eps * p)) / std::log(1.0 / std::abs(1.0 - lambda));
    };
    const double r = std::max({1.0, node_interval(env.p_a, env.lambda_a, "a"), node_interval(env.p_b, env.lambda_b, "b")});
    const double base = 1.0 / env.p_a + 1.0 / env.p_b - 1.0;
    std::ostringstream tag;
    tag << "lambda not in {0,2}, eps=" << eps;
    return {{r, Kind::restriction_interval, tag.str()},
            {r * base, Kind::upper_bound, "Strategy C, general Markov, envelope up to constants"}};
}

}  // namespace rendezvous::theory
