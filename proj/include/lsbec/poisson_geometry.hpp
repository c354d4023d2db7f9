#pragma once

// Random interval partitions induced by point impurities on a segment, and
// the order statistics of i.i.d. exponential interval lengths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/rng.hpp"

namespace lsbec {

/// Ordered interval lengths tiling [-L/2, L/2]; walls at both ends, so
/// impurity_count() interior points give impurity_count() + 1 intervals.
class IntervalPartition {
public:
    IntervalPartition(std::vector<double> lengths, double total_length)
        : lengths_(std::move(lengths)), total_(total_length) {
        detail::require_positive(total_, "total_length");
        detail::require(!lengths_.empty(), "partition needs at least one interval");
        CompensatedSum s;
        for (double l : lengths_) {
            detail::require(std::isfinite(l) && l > 0.0, "interval lengths must be positive");
            s += l;
        }
        detail::require(std::abs(s.value() - total_) <= 1e-12 * total_,
                        "interval lengths must sum to total_length");
    }

    /// Partition whose total is the sum of the given lengths.
    static IntervalPartition from_lengths(std::vector<double> lengths) {
        CompensatedSum s;
        for (double l : lengths) s += l;
        const double total = s.value();
        return IntervalPartition(std::move(lengths), total);
    }

    const std::vector<double>& lengths() const noexcept { return lengths_; }
    double total_length() const noexcept { return total_; }
    std::size_t size() const noexcept { return lengths_.size(); }
    std::size_t impurity_count() const noexcept { return lengths_.size() - 1; }

    double largest() const { return *std::max_element(lengths_.begin(), lengths_.end()); }

    /// Left endpoint of every interval, starting at -L/2.
    std::vector<double> left_endpoints() const {
        std::vector<double> x(lengths_.size());
        CompensatedSum pos;
        pos += -0.5 * total_;
        for (std::size_t j = 0; j < lengths_.size(); ++j) {
            x[j] = pos.value();
            pos += lengths_[j];
        }
        return x;
    }

private:
    std::vector<double> lengths_;
    double total_;
};

struct PoissonParams {
    double intensity;
    std::uint64_t seed = 0;

    PoissonParams(double lam, std::uint64_t s) : intensity(lam), seed(s) {
        detail::require_positive(lam, "intensity");
    }
};

/// n intervals cut by n-1 i.i.d. uniform points: the spacings are a scaled
/// Dirichlet(1,...,1) vector, drawn as normalized exponentials.
template <class URBG>
IntervalPartition sample_uniform_partition(double L, std::size_t n, URBG& gen) {
    detail::require_positive(L, "L");
    detail::require(n >= 1, "n must be >= 1");
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(n);
    for (;;) {
        CompensatedSum total;
        bool degenerate = false;
        for (auto& x : w) {
            x = expo(gen);
            degenerate |= !(x > 0.0);
            total += x;
        }
        if (degenerate) continue;
        const double scale = L / total.value();
        for (auto& x : w) x *= scale;
        break;
    }
    // Absorb the rounding residue into the largest spacing.
    CompensatedSum s;
    for (double x : w) s += x;
    auto big = std::max_element(w.begin(), w.end());
    *big += L - s.value();
    return IntervalPartition(std::move(w), L);
}

inline IntervalPartition sample_uniform_partition(double L, std::size_t n, std::uint64_t seed) {
    auto gen = make_stream(seed, 0);
    return sample_uniform_partition(L, n, gen);
}

/// Poisson field restricted to a segment: count ~ Poisson(lambda L), then
/// uniform positions. A zero count gives the single interval [ -L/2, L/2 ].
template <class URBG>
IntervalPartition sample_poisson_partition(double L, double intensity, URBG& gen) {
    detail::require_positive(L, "L");
    detail::require_positive(intensity, "intensity");
    const double mean = intensity * L;
    detail::require(mean < 0.25 * static_cast<double>(std::numeric_limits<std::int64_t>::max()),
                    "expected impurity count overflows the integer range");
    std::poisson_distribution<std::int64_t> count(mean);
    const auto impurities = static_cast<std::size_t>(count(gen));
    return sample_uniform_partition(L, impurities + 1, gen);
}

inline IntervalPartition sample_poisson_partition(double L, const PoissonParams& params) {
    auto gen = make_stream(params.seed, 0);
    return sample_poisson_partition(L, params.intensity, gen);
}

/// Top of an ordered i.i.d. exponential sample.
struct OrderStatSample {
    std::vector<double> sorted_lengths;  // non-increasing
    std::size_t sample_size = 0;
};

template <class URBG>
OrderStatSample sample_order_statistics(double lambda, std::size_t k, URBG& gen) {
    detail::require_positive(lambda, "lambda");
    detail::require(k >= 1, "k must be >= 1");
    std::exponential_distribution<double> expo(lambda);
    OrderStatSample out;
    out.sorted_lengths.resize(k);
    for (auto& x : out.sorted_lengths) x = expo(gen);
    std::sort(out.sorted_lengths.begin(), out.sorted_lengths.end(), std::greater<>());
    out.sample_size = k;
    return out;
}

/// Largest and second largest of k i.i.d. Exponential(lambda) draws, without
/// storing the sample.
template <class URBG>
std::pair<double, double> sample_top_two(double lambda, std::size_t k, URBG& gen) {
    detail::require(k >= 2, "k must be >= 2");
    std::exponential_distribution<double> expo(lambda);
    double first = expo(gen);
    double second = expo(gen);
    if (second > first) std::swap(first, second);
    for (std::size_t i = 2; i < k; ++i) {
        const double x = expo(gen);
        if (x > second) {
            if (x > first) {
                second = first;
                first = x;
            } else {
                second = x;
            }
        }
    }
    return {first, second};
}

/// E[L_1] = (1/lambda) H_k for the largest of k exponentials.
inline double expected_largest(double lambda, std::size_t k) {
    detail::require_positive(lambda, "lambda");
    detail::require(k >= 1, "k must be >= 1");
    return harmonic_sum(1, k) / lambda;
}

/// E[L_2] = (1/lambda)(H_k - 1).
inline double expected_second_largest(double lambda, std::size_t k) {
    detail::require_positive(lambda, "lambda");
    detail::require(k >= 2, "k must be >= 2 for a second largest");
    return harmonic_sum(2, k) / lambda;
}

enum class Rank { first, second };

/// (ln k + P)/lambda with P = C (first) or C - 1 (second); error O(1/k).
inline double largest_asymptotic(double lambda, std::size_t k, Rank which) {
    detail::require_positive(lambda, "lambda");
    detail::require(k >= 3, "k must be >= 3");
    const double p = which == Rank::first ? euler_gamma : euler_gamma - 1.0;
    return (std::log(static_cast<double>(k)) + p) / lambda;
}

/// P(L_1 - L_2 > delta) = exp(-lambda delta), independent of k.
inline double gap_exceedance_probability(double lambda, double delta) {
    detail::require_positive(lambda, "lambda");
    detail::require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
    return std::exp(-lambda * delta);
}

inline double gap_variance(double lambda) {
    detail::require_positive(lambda, "lambda");
    return 1.0 / (lambda * lambda);
}

/// A(s,t) = int_0^inf ln^s(x) x^t e^{-x} dx for 0 <= s <= 4, 0 <= t <= 60,
/// built from A(s,t) = t A(s,t-1) + s A(s-1,t-1) and the t = 0 column
/// A(s,0) = Gamma^{(s)}(1).
inline double a_function(int s, int t) {
    detail::require(s >= 0 && s <= 4 && t >= 0 && t <= 60,
                    "a_function supports 0 <= s <= 4, 0 <= t <= 60");
    constexpr double g = euler_gamma;
    constexpr double z2 = std::numbers::pi * std::numbers::pi / 6.0;
    constexpr double z4 = z2 * z2 * 0.4;  // pi^4/90
    // Gamma^{(s)}(1): moments of ln x under e^{-x}
    const double col0[5] = {
        1.0,
        -g,
        g * g + z2,
        -(g * g * g + 3.0 * g * z2 + 2.0 * apery),
        g * g * g * g + 6.0 * g * g * z2 + 8.0 * g * apery + 3.0 * z2 * z2 + 6.0 * z4,
    };
    std::vector<double> prev(s + 1), cur(s + 1);
    for (int i = 0; i <= s && i < 5; ++i) prev[i] = col0[i];
    for (int tt = 1; tt <= t; ++tt) {
        cur[0] = tt * prev[0];
        for (int i = 1; i <= s; ++i) cur[i] = tt * prev[i] + i * prev[i - 1];
        std::swap(prev, cur);
    }
    return prev[s];
}

} // namespace lsbec
