#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rendezvous {

/// Channel IDs are 1-based: valid IDs are 1..n.
using ChannelId = std::size_t;

/// The channel a node tries this round, or nullopt when it stays silent.
using Selection = std::optional<ChannelId>;

/// Per-node availability of the n channels at one round.
class ChannelVector {
public:
    ChannelVector() = default;
    explicit ChannelVector(std::size_t n, bool open = false) : bits_(n, open ? 1 : 0) {}
    ChannelVector(std::initializer_list<int> bits) {
        bits_.reserve(bits.size());
        for (int b : bits) bits_.push_back(b != 0 ? 1 : 0);
    }

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }

    [[nodiscard]] bool is_open(ChannelId c) const { return bits_[index(c)] != 0; }
    void set(ChannelId c, bool open) { bits_[index(c)] = open ? 1 : 0; }

    [[nodiscard]] std::size_t open_count() const noexcept {
        std::size_t k = 0;
        for (auto b : bits_) k += b;
        return k;
    }

    /// Lowest open channel with ID >= first, or nullopt.
    [[nodiscard]] Selection first_open_from(ChannelId first) const noexcept {
        for (std::size_t c = first == 0 ? 1 : first; c <= bits_.size(); ++c) {
            if (bits_[c - 1] != 0) return c;
        }
        return std::nullopt;
    }

    /// The rank-th open channel (rank 1 = lowest ID), or nullopt.
    [[nodiscard]] Selection nth_open(std::size_t rank) const noexcept {
        for (std::size_t c = 1; c <= bits_.size(); ++c) {
            if (bits_[c - 1] != 0 && --rank == 0) return c;
        }
        return std::nullopt;
    }

    /// Bit i-1 of the result is channel i. Only meaningful for n <= 64.
    [[nodiscard]] std::uint64_t to_mask() const noexcept {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < bits_.size() && i < 64; ++i) {
            if (bits_[i] != 0) m |= std::uint64_t{1} << i;
        }
        return m;
    }

    static ChannelVector from_mask(std::uint64_t mask, std::size_t n) {
        ChannelVector v(n);
        for (std::size_t i = 0; i < n; ++i) v.bits_[i] = (mask >> i) & 1U;
        return v;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(b != 0 ? '1' : '0');
        return s;
    }

    friend bool operator==(const ChannelVector&, const ChannelVector&) = default;

private:
    std::size_t index(ChannelId c) const {
        if (c == 0 || c > bits_.size()) {
            throw std::out_of_range("channel id " + std::to_string(c) + " outside 1.." +
                                    std::to_string(bits_.size()));
        }
        return c - 1;
    }

    std::vector<std::uint8_t> bits_;
};

/// Lowest channel open in both vectors, or nullopt.
inline Selection first_common_open(const ChannelVector& a, const ChannelVector& b) {
    const auto n = a.size() < b.size() ? a.size() : b.size();
    for (ChannelId c = 1; c <= n; ++c) {
        if (a.is_open(c) && b.is_open(c)) return c;
    }
    return std::nullopt;
}

}  // namespace rendezvous
