#pragma once

// Per-round channel-selection rules.
//
//   A       stationary; rank-biased pick among open channels, geometric
//           with success parameter peer_p / 6 over open-channel ranks
//   B       time-adaptive; first open channel with ID >= round
//   Btilde  time-adaptive; first open channel with ID >= ceil(round / 2)
//   C       stationary; first open channel
//   random  stationary; uniform over open channels

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rendezvous/channel.hpp"

namespace rendezvous {

enum class StrategyKind { A, B, BTilde, C, Random };

/// What Strategy A does when its geometric rank exceeds the number of open
/// channels: draw from the law truncated to the open ranks (default), or
/// stay silent for the round.
enum class RankOverflow { renormalize, silent };

/// Which selection rule a node runs. peer_open_prob and overflow are only
/// read by kind A.
struct StrategySpec {
    StrategyKind kind = StrategyKind::C;
    std::optional<double> peer_open_prob = std::nullopt;
    RankOverflow overflow = RankOverflow::renormalize;

    void validate() const {
        if (kind != StrategyKind::A) return;
        if (!peer_open_prob || !(*peer_open_prob > 0.0 && *peer_open_prob <= 1.0)) {
            throw std::invalid_argument("strategy A needs peer_p in (0, 1]");
        }
    }

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

/// Alice's and Bob's rules for one scenario.
struct StrategyPair {
    StrategySpec alice;
    StrategySpec bob;

    friend bool operator==(const StrategyPair&, const StrategyPair&) = default;
};

inline std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::A: return "A";
        case StrategyKind::B: return "B";
        case StrategyKind::BTilde: return "Btilde";
        case StrategyKind::C: return "C";
        case StrategyKind::Random: return "random";
    }
    return "?";
}

inline std::string_view to_string(RankOverflow o) {
    return o == RankOverflow::silent ? "silent" : "renormalize";
}

inline RankOverflow parse_rank_overflow(std::string_view name) {
    if (name == "renormalize") return RankOverflow::renormalize;
    if (name == "silent") return RankOverflow::silent;
    throw std::invalid_argument("unknown rank overflow '" + std::string(name) + "' (expected renormalize or silent)");
}

/// Accepts "A", "B", "Btilde", "C", "random" (case-insensitive).
inline StrategyKind parse_strategy_kind(std::string_view name) {
    std::string lower;
    for (char ch : name) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (lower == "a") return StrategyKind::A;
    if (lower == "b") return StrategyKind::B;
    if (lower == "btilde") return StrategyKind::BTilde;
    if (lower == "c") return StrategyKind::C;
    if (lower == "random") return StrategyKind::Random;
    throw std::invalid_argument("unknown strategy '" + std::string(name) +
                                "' (expected A, B, Btilde, C or random)");
}

/// Round-independent rules work without a common clock.
inline bool is_stationary(StrategyKind kind) noexcept {
    return kind == StrategyKind::A || kind == StrategyKind::C || kind == StrategyKind::Random;
}

inline bool is_deterministic(StrategyKind kind) noexcept {
    return kind == StrategyKind::B || kind == StrategyKind::BTilde || kind == StrategyKind::C;
}

/// First channel ID a time-adaptive rule considers at this round.
inline ChannelId window_start(StrategyKind kind, std::uint64_t round) noexcept {
    switch (kind) {
        case StrategyKind::B: return round;
        case StrategyKind::BTilde: return (round + 1) / 2;
        default: return 1;
    }
}

inline constexpr double kGeometricDivisor = 6.0;

template <std::uniform_random_bit_generator Rng>
Selection choose_A(const ChannelVector& state, double peer_open_prob, Rng& rng,
                   RankOverflow overflow = RankOverflow::renormalize) {
    if (!(peer_open_prob > 0.0 && peer_open_prob <= 1.0)) {
        throw std::invalid_argument("strategy A needs peer_p in (0, 1]");
    }
    const auto k = state.open_count();
    if (k == 0) return std::nullopt;
    const bool truncate = overflow == RankOverflow::renormalize;
    if (k == 1 && truncate) return state.nth_open(1);
    // Inverse CDF of the geometric law, restricted to ranks 1..k when
    // truncating: F(r) = (1 - (1-s)^r) / (1 - (1-s)^k).
    const double s = peer_open_prob / kGeometricDivisor;
    const double log_fail = std::log1p(-s);
    const double mass = truncate ? -std::expm1(static_cast<double>(k) * log_fail) : 1.0;
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double r = std::floor(std::log1p(-u * mass) / log_fail);
    const auto rank = static_cast<std::size_t>(std::min(std::max(r, 0.0), static_cast<double>(k))) + 1;
    if (rank > k) return truncate ? state.nth_open(k) : std::nullopt;
    return state.nth_open(rank);
}

inline Selection choose_B(const ChannelVector& state, std::uint64_t round) {
    if (round == 0) throw std::invalid_argument("rounds are numbered from 1");
    if (round > state.size()) return std::nullopt;
    return state.first_open_from(round);
}

inline Selection choose_BTilde(const ChannelVector& state, std::uint64_t round) {
    if (round == 0) throw std::invalid_argument("rounds are numbered from 1");
    const auto start = window_start(StrategyKind::BTilde, round);
    if (start > state.size()) return std::nullopt;
    return state.first_open_from(start);
}

inline Selection choose_C(const ChannelVector& state) { return state.first_open_from(1); }

template <std::uniform_random_bit_generator Rng>
Selection choose_random(const ChannelVector& state, Rng& rng) {
    const auto k = state.open_count();
    if (k == 0) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(1, k);
    return state.nth_open(pick(rng));
}

template <std::uniform_random_bit_generator Rng>
Selection choose(const StrategySpec& spec, const ChannelVector& state, std::uint64_t round, Rng& rng) {
    switch (spec.kind) {
        case StrategyKind::A: return choose_A(state, spec.peer_open_prob.value_or(0.0), rng, spec.overflow);
        case StrategyKind::B: return choose_B(state, round);
        case StrategyKind::BTilde: return choose_BTilde(state, round);
        case StrategyKind::C: return choose_C(state);
        case StrategyKind::Random: return choose_random(state, rng);
    }
    return std::nullopt;
}

/// Probability of picking each channel (index c-1) under a stationary rule.
/// All zeros when no channel is open; sums below 1 for a silent-overflow A.
inline std::vector<double> selection_distribution(const StrategySpec& spec, const ChannelVector& state) {
    std::vector<double> dist(state.size(), 0.0);
    const auto k = state.open_count();
    if (k == 0) return dist;
    switch (spec.kind) {
        case StrategyKind::C:
            dist[*state.first_open_from(1) - 1] = 1.0;
            break;
        case StrategyKind::Random:
            for (ChannelId c = 1; c <= state.size(); ++c) {
                if (state.is_open(c)) dist[c - 1] = 1.0 / static_cast<double>(k);
            }
            break;
        case StrategyKind::A: {
            spec.validate();
            const double s = *spec.peer_open_prob / kGeometricDivisor;
            double weight = s;
            double total = 0.0;
            for (ChannelId c = 1; c <= state.size(); ++c) {
                if (!state.is_open(c)) continue;
                dist[c - 1] = weight;
                total += weight;
                weight *= 1.0 - s;
            }
            if (spec.overflow == RankOverflow::renormalize) {
                for (auto& d : dist) d /= total;
            }
            break;
        }
        case StrategyKind::B:
        case StrategyKind::BTilde:
            throw std::invalid_argument("time-adaptive strategies have no stationary selection distribution");
    }
    return dist;
}

}  // namespace rendezvous
