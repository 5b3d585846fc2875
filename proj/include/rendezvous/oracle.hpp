#pragma once

// Exact small-instance ground truth.
//
// Joint states pack Alice's availability into bits 0..n-1 and Bob's into
// bits n..2n-1, so a state is an integer in [0, 4^n). n is capped at 6.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rendezvous/channel.hpp"
#include "rendezvous/env_model.hpp"
#include "rendezvous/strategies.hpp"

namespace rendezvous::oracle {

inline constexpr std::size_t kMaxChannels = 6;

struct JointState {
    std::uint32_t alice_bits = 0;
    std::uint32_t bob_bits = 0;

    [[nodiscard]] std::uint32_t encode(std::size_t n) const noexcept { return alice_bits | (bob_bits << n); }
    static JointState decode(std::uint32_t code, std::size_t n) noexcept {
        const std::uint32_t low = (std::uint32_t{1} << n) - 1;
        return {code & low, (code >> n) & low};
    }
};

namespace detail {

inline void check_size(const EnvSpec& env) {
    env.validate();
    if (env.n > kMaxChannels) {
        std::ostringstream os;
        os << "exact oracles support n <= " << kMaxChannels << ", got " << env.n;
        throw std::invalid_argument(os.str());
    }
    if (env.has_intruder()) throw std::invalid_argument("exact oracles do not model the intruder mask");
    if (env.dynamics != Dynamics::markov) throw std::invalid_argument("exact oracles need Markov dynamics");
}

inline double bernoulli_weight(std::uint32_t bits, std::size_t n, double p) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= ((bits >> i) & 1U) ? p : 1.0 - p;
    return w;
}

}  // namespace detail

/// Round of the first meeting for deterministic rules on frozen
/// availability, or nullopt if they never meet.
inline std::optional<std::uint64_t> stable_trace(const ChannelVector& alice, const ChannelVector& bob,
                                                 const StrategyPair& pair, std::uint64_t clock_offset = 0) {
    if (!is_deterministic(pair.alice.kind) || !is_deterministic(pair.bob.kind)) {
        throw std::invalid_argument("stable_trace needs deterministic strategies (B, Btilde, C)");
    }
    // By this round every time-adaptive window has moved past n; C repeats
    // round 1 forever.
    const std::uint64_t horizon = 2 * alice.size() + 2;
    std::mt19937_64 unused;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const auto a = choose(pair.alice, alice, t, unused);
        const auto b = choose(pair.bob, bob, t + clock_offset, unused);
        if (a && a == b) return t;
    }
    return std::nullopt;
}

struct StableResult {
    /// E[TTR] conditioned on a common channel existing and on meeting.
    double expected_ttr = 0.0;
    /// Probability (given a common channel) that the pair never meets.
    double divergent_mass = 0.0;
};

/// Exhaustive enumeration of all 4^n initial joint states of a stable
/// environment, conditioned on at least one common open channel.
inline StableResult exact_ttr_stable(const EnvSpec& env, const StrategyPair& pair, std::uint64_t clock_offset = 0) {
    detail::check_size(env);
    if (!env.is_stable()) throw std::invalid_argument("exact_ttr_stable needs lambda_a = lambda_b = 0");
    if (!is_deterministic(pair.alice.kind) || !is_deterministic(pair.bob.kind)) {
        throw std::invalid_argument("exact_ttr_stable handles B, Btilde and C; use exact_ttr_markov for A and random");
    }
    const std::size_t n = env.n;
    const std::uint32_t per_node = std::uint32_t{1} << n;
    double common_mass = 0.0;
    double met_mass = 0.0;
    double weighted_ttr = 0.0;
    for (std::uint32_t a = 0; a < per_node; ++a) {
        const double wa = detail::bernoulli_weight(a, n, env.p_a);
        for (std::uint32_t b = 0; b < per_node; ++b) {
            if ((a & b) == 0) continue;
            const double w = wa * detail::bernoulli_weight(b, n, env.p_b);
            common_mass += w;
            const auto ttr =
                stable_trace(ChannelVector::from_mask(a, n), ChannelVector::from_mask(b, n), pair, clock_offset);
            if (ttr) {
                met_mass += w;
                weighted_ttr += w * static_cast<double>(*ttr);
            }
        }
    }
    StableResult r;
    r.divergent_mass = (common_mass - met_mass) / common_mass;
    r.expected_ttr = met_mass > 0.0 ? weighted_ttr / met_mass : INFINITY;
    return r;
}

/// Exact E[TTR] for round-independent rules (A, C, random) under Markov
/// dynamics, started from the stationary product-Bernoulli distribution.
///
/// With r(s) the one-round meeting probability in joint state s and P the
/// joint transition matrix, the expected remaining time h solves
/// (I - diag(1 - r) P) h = 1, and E[TTR] = pi0 . h.
inline double exact_ttr_markov(const EnvSpec& env, const StrategyPair& pair) {
    detail::check_size(env);
    auto check_node = [](double p, double lambda, const char* who) {
        if (p < 1.0 && !(lambda > 0.0 && lambda < 2.0)) {
            std::ostringstream os;
            os << "exact_ttr_markov needs 0 < lambda_" << who << " < 2, got " << lambda;
            throw std::invalid_argument(os.str());
        }
    };
    check_node(env.p_a, env.lambda_a, "a");
    check_node(env.p_b, env.lambda_b, "b");
    if (!is_stationary(pair.alice.kind) || !is_stationary(pair.bob.kind)) {
        throw std::invalid_argument("exact_ttr_markov handles A, C and random; B and Btilde depend on the round");
    }

    const std::size_t n = env.n;
    const std::uint32_t per_node = std::uint32_t{1} << n;
    const std::size_t states = std::size_t{per_node} * per_node;

    // node_step[x][y]: probability that one node moves from bits x to bits y.
    auto node_step = [n, per_node](double close, double reopen) {
        Eigen::MatrixXd t(per_node, per_node);
        for (std::uint32_t x = 0; x < per_node; ++x) {
            for (std::uint32_t y = 0; y < per_node; ++y) {
                double w = 1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const bool from = (x >> i) & 1U;
                    const bool to = (y >> i) & 1U;
                    w *= from ? (to ? 1.0 - close : close) : (to ? reopen : 1.0 - reopen);
                }
                t(x, y) = w;
            }
        }
        return t;
    };
    const Eigen::MatrixXd step_a = node_step(env.a0(), env.a1());
    const Eigen::MatrixXd step_b = node_step(env.b0(), env.b1());

    std::vector<std::vector<double>> dist_a(per_node);
    std::vector<std::vector<double>> dist_b(per_node);
    for (std::uint32_t x = 0; x < per_node; ++x) {
        dist_a[x] = selection_distribution(pair.alice, ChannelVector::from_mask(x, n));
        dist_b[x] = selection_distribution(pair.bob, ChannelVector::from_mask(x, n));
    }

    auto weight0 = [&](std::uint32_t code) {
        const auto s = JointState::decode(code, n);
        return detail::bernoulli_weight(s.alice_bits, n, env.p_a) * detail::bernoulli_weight(s.bob_bits, n, env.p_b);
    };
    auto transition = [&](std::uint32_t from, std::uint32_t to) {
        const auto s = JointState::decode(from, n);
        const auto s2 = JointState::decode(to, n);
        return step_a(s.alice_bits, s2.alice_bits) * step_b(s.bob_bits, s2.bob_bits);
    };

    // Solve only over states reachable from the initial support; with p = 1
    // the rest have zero weight and can make the full system singular.
    std::vector<std::int64_t> slot(states, -1);
    std::vector<std::uint32_t> reachable;
    for (std::uint32_t code = 0; code < states; ++code) {
        if (weight0(code) > 0.0) {
            slot[code] = static_cast<std::int64_t>(reachable.size());
            reachable.push_back(code);
        }
    }
    for (std::size_t head = 0; head < reachable.size(); ++head) {
        const auto from = reachable[head];
        for (std::uint32_t to = 0; to < states; ++to) {
            if (slot[to] < 0 && transition(from, to) > 0.0) {
                slot[to] = static_cast<std::int64_t>(reachable.size());
                reachable.push_back(to);
            }
        }
    }

    const auto m = static_cast<Eigen::Index>(reachable.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd initial(m);
    for (Eigen::Index row = 0; row < m; ++row) {
        const auto code = reachable[static_cast<std::size_t>(row)];
        const auto s = JointState::decode(code, n);
        double meet = 0.0;
        for (std::size_t c = 0; c < n; ++c) meet += dist_a[s.alice_bits][c] * dist_b[s.bob_bits][c];
        const double miss = 1.0 - meet;
        initial(row) = weight0(code);
        if (miss == 0.0) continue;
        for (Eigen::Index col = 0; col < m; ++col) {
            system(row, col) -= miss * transition(code, reachable[static_cast<std::size_t>(col)]);
        }
    }
    const Eigen::VectorXd remaining = system.partialPivLu().solve(Eigen::VectorXd::Ones(m));
    const double expected = initial.dot(remaining);
    if (!std::isfinite(expected)) {
        throw std::domain_error("rendezvous is not reachable from every initial state");
    }
    return expected;
}

}  // namespace rendezvous::oracle
