#pragma once

// Statistics of the largest Poisson intervals: logarithmic growth of the
// largest one, the ground-level spacing between the two largest, and a
// finite-volume check that the condensate sits in a single ground state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/poisson_geometry.hpp"
#include "lsbec/rng.hpp"
#include "lsbec/spectrum.hpp"
#include "lsbec/thermodynamics.hpp"

namespace lsbec {

struct ScalingStats {
    double mean = 0.0;
    double std = 0.0;
    std::size_t trials = 0;
};

/// Mean and std over trials of L_1 / (ln(lambda L)/lambda) for Poisson
/// partitions of [-L/2, L/2]. Trial i uses stream (seed, i).
inline ScalingStats largest_interval_scaling(double lambda, double L, std::size_t trials, std::uint64_t seed,
                                             unsigned workers = default_workers()) {
    detail::require_positive(lambda, "lambda");
    detail::require_positive(L, "L");
    detail::require(lambda * L > std::exp(1.0), "need lambda L > e");
    detail::require(trials >= 1, "trials must be >= 1");
    const double scale = std::log(lambda * L) / lambda;
    std::vector<double> ratio(trials);
    parallel_for(trials, workers, [&](std::size_t i) {
        auto gen = make_stream(seed, i);
        ratio[i] = sample_poisson_partition(L, lambda, gen).largest() / scale;
    });
    const auto m = moments(ratio);
    return {m.mean, m.std, trials};
}

struct SpacingQuery {
    std::uint64_t sample_size;  // k
    double amplitude;           // a
    double exponent;            // gamma
    double lambda = 1.0;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;

    SpacingQuery(std::uint64_t k, double a, double gamma, double lam = 1.0, std::uint64_t n_trials = 1,
                 std::uint64_t s = 0)
        : sample_size(k), amplitude(a), exponent(gamma), lambda(lam), trials(n_trials), seed(s) {
        detail::require(k >= 2, "sample_size must be >= 2");
        detail::require_positive(a, "amplitude");
        detail::require(gamma > 0.0 && gamma < 1.0, "exponent must lie in (0, 1)");
        detail::require_positive(lam, "lambda");
        detail::require(n_trials >= 1, "trials must be >= 1");
    }

    /// a / k^{1 - gamma}
    double threshold() const { return amplitude / std::pow(static_cast<double>(sample_size), 1.0 - exponent); }
};

struct ProbabilityEstimate {
    double estimate = 0.0;
    double std_error = 0.0;  // binomial, sqrt(p (1 - p) / n)
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

/// Frequency of E_1(L_2) - E_1(L_1) > a/k^{1-gamma} for the two largest of
/// k i.i.d. Exponential(lambda) lengths.
inline ProbabilityEstimate spacing_probability_mc(const SpacingQuery& q, unsigned workers = default_workers()) {
    const double t = q.threshold();
    std::vector<std::uint8_t> hit(q.trials);
    parallel_for(q.trials, workers, [&](std::size_t i) {
        auto gen = make_stream(q.seed, i);
        const auto [l1, l2] = sample_top_two(q.lambda, q.sample_size, gen);
        hit[i] = dirichlet_eigenvalue(l2, 1) - dirichlet_eigenvalue(l1, 1) > t;
    });
    ProbabilityEstimate out;
    out.trials = q.trials;
    for (auto h : hit) out.successes += h;
    const double n = static_cast<double>(q.trials);
    out.estimate = static_cast<double>(out.successes) / n;
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

namespace detail {

/// int_0^{y_max} dy k(k-1) lambda e^{-lambda y}(1 - e^{-lambda y})^{k-2} e^{-lambda x(y)}:
/// the top-two density with the larger length integrated from x(y) to infinity.
/// x(y) = +inf (or y_max reached) means the event is impossible.
template <class Xmin>
double top_two_tail_integral(std::uint64_t k, double lambda, double y_max, Xmin&& x_min) {
    const double kd = static_cast<double>(k);
    const double log_pref = std::log(kd) + std::log(kd - 1.0) + std::log(lambda);
    auto g = [&](double y) {
        if (!(y > 0.0) || !(y < y_max)) return 0.0;
        const double x = x_min(y);
        if (!std::isfinite(x)) return 0.0;
        const double lg = log_pref - lambda * y + (kd - 2.0) * std::log1p(-std::exp(-lambda * y)) - lambda * x;
        return std::exp(lg);
    };
    // The second largest concentrates around ln(k)/lambda with O(1/lambda) width.
    const double mode = std::log(kd) / lambda;
    std::vector<double> breaks{0.0};
    for (int j = -12; j <= 48; ++j) {
        const double y = mode + j / lambda;
        if (y > 0.0 && y < y_max) breaks.push_back(y);
    }
    breaks.push_back(y_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return std::clamp(quad::panels(g, breaks), 0.0, 1.0);
}

} // namespace detail

/// P(E_1(L_2) - E_1(L_1) > t) for the top two of k exponentials, exactly:
/// the event is L_1 > (1/L_2^2 - t/c^2)^{-1/2} with L_2 < c/sqrt(t).
inline double spacing_probability_exact(const SpacingQuery& q) {
    const double t = q.threshold();
    const double y_max = c_const / std::sqrt(t);
    auto x_min = [&](double y) {
        const double inv = 1.0 / (y * y) - t / c_squared;
        return inv > 0.0 ? 1.0 / std::sqrt(inv) : INFINITY;
    };
    return detail::top_two_tail_integral(q.sample_size, q.lambda, y_max, x_min);
}

/// Probability of L_1 - L_2 > tau L_1 L_2^2 with tau = t/(factor c^2).
/// factor = 1 gives a rigorous lower bound on spacing_probability_exact
/// (it uses L_1 + L_2 >= L_1); factor = 2 replaces L_1 + L_2 by 2 L_1 and
/// therefore bounds the probability from above.
inline double spacing_probability_bound(const SpacingQuery& q, double factor) {
    detail::require_positive(factor, "factor");
    const double tau = q.threshold() / (factor * c_squared);
    const double y_max = 1.0 / std::sqrt(tau);
    auto x_min = [&](double y) {
        const double d = 1.0 - tau * y * y;
        return d > 0.0 ? y / d : INFINITY;
    };
    return detail::top_two_tail_integral(q.sample_size, q.lambda, y_max, x_min);
}

/// Ground-state share of the low-energy occupation for one realization.
struct OccupationFraction {
    std::uint64_t seed = 0;
    std::optional<double> fraction;  // empty when no level lies below epsilon
    bool tie = false;                // two largest intervals equal to 1e-12 relative
    bool empty_window = false;
    std::size_t window_levels = 0;
    double mu = 0.0;
};

/// Occupation of the lowest level (ground state of the largest interval)
/// over the occupation of all levels below epsilon, at mu solving
/// density_finite(mu) = rho.
inline OccupationFraction occupation_fraction(const IntervalPartition& partition, double beta, double rho,
                                              double epsilon = 0.01) {
    detail::require_positive(epsilon, "epsilon");
    OccupationFraction out;
    out.mu = solve_mu_finite(partition, beta, rho);
    const auto& lengths = partition.lengths();
    double l1 = 0.0, l2 = 0.0;
    for (double l : lengths) {
        if (l > l1) {
            l2 = l1;
            l1 = l;
        } else if (l > l2) {
            l2 = l;
        }
    }
    out.tie = lengths.size() >= 2 && (l1 - l2) <= 1e-12 * l1;
    CompensatedSum window;
    double ground = 0.0;
    for (double Lj : lengths) {
        for (std::uint64_t s = 1;; ++s) {
            const double E = dirichlet_eigenvalue(Lj, s);
            if (!(E < epsilon)) break;
            const double occ = bose(beta * (E - out.mu));
            window += occ;
            ++out.window_levels;
            if (s == 1 && Lj == l1 && ground == 0.0) ground = occ;
        }
    }
    if (out.window_levels == 0) {
        out.empty_window = true;
        return out;
    }
    out.fraction = std::clamp(ground / window.value(), 0.0, 1.0);
    return out;
}

/// occupation_fraction over Poisson partitions, one per seed (stream (seed, 0)).
inline std::vector<OccupationFraction> ground_state_occupation_fraction(const ModelParams& p, double beta,
                                                                       double rho, double L,
                                                                       std::span<const std::uint64_t> seeds,
                                                                       double epsilon = 0.01,
                                                                       unsigned workers = default_workers()) {
    detail::require_positive(beta, "beta");
    detail::require_positive(L, "L");
    const double rc = critical_density(p, beta);
    detail::require_domain(rho > rc, "rho must exceed the critical density " + std::to_string(rc));
    std::vector<OccupationFraction> out(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t i) {
        const auto part = sample_poisson_partition(L, PoissonParams(p.lambda, seeds[i]));
        out[i] = occupation_fraction(part, beta, rho, epsilon);
        out[i].seed = seeds[i];
    });
    return out;
}

} // namespace lsbec
