#pragma once

// Small statistical checks shared by the test suites. All tests use fixed
// seeds, so every check is reproducible.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace rendezvous::testing {

/// |observed - p| <= sigmas * sqrt(p(1-p)/n) for a binomial frequency.
inline bool within_binomial_sigmas(std::uint64_t hits, std::uint64_t n, double p, double sigmas = 3.0) {
    const double freq = static_cast<double>(hits) / static_cast<double>(n);
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return std::abs(freq - p) <= sigmas * sd;
}

/// Pearson statistic of observed counts against expected probabilities.
inline double chi_square_statistic(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs) {
    std::uint64_t total = 0;
    for (auto o : observed) total += o;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = probs[i] * static_cast<double>(total);
        if (e == 0.0) continue;
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    return stat;
}

/// Upper critical value of the chi-square law at significance alpha.
inline double chi_square_critical(double dof, double alpha = 0.001) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

}  // namespace rendezvous::testing
