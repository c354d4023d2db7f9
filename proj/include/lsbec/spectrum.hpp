#pragma once

// One-particle spectrum: Dirichlet levels per interval, finite-volume counting
// function and the closed-form limiting integrated density of states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/poisson_geometry.hpp"

namespace lsbec {

struct SpectralLevel {
    std::size_t interval_index = 0;
    std::uint64_t quantum_number = 1;
    double energy = 0.0;
};

/// E_s(L) = (1/2)(pi s / L)^2 = c^2 (s/L)^2.
inline double dirichlet_eigenvalue(double L, std::uint64_t s) {
    detail::require_positive(L, "L");
    detail::require(s >= 1, "quantum number must be >= 1");
    const double ratio = static_cast<double>(s) / L;
    return c_squared * (ratio * ratio);
}

/// sqrt(2/L) sin(pi s (x - left)/L) inside (left, left + L), zero outside.
inline double dirichlet_eigenfunction(double L, double left_endpoint, std::uint64_t s, double x) {
    detail::require_positive(L, "L");
    const double u = x - left_endpoint;
    if (!(u > 0.0 && u < L)) return 0.0;
    return std::sqrt(2.0 / L) * std::sin(std::numbers::pi * static_cast<double>(s) * u / L);
}

/// Number of levels of a length-L interval strictly below E.
inline std::uint64_t levels_below(double L, double E) {
    if (!(E > 0.0)) return 0;
    double x = L * std::sqrt(E / c_squared);
    auto n = static_cast<std::uint64_t>(std::max(0.0, std::ceil(x) - 1.0));
    while (dirichlet_eigenvalue(L, n + 1) < E) ++n;
    while (n > 0 && !(dirichlet_eigenvalue(L, n) < E)) --n;
    return n;
}

/// (1/L) #{levels < E}; an eigenvalue exactly at E is not counted.
inline double counting_function(const IntervalPartition& partition, double E) {
    detail::require_positive(E, "E");
    std::uint64_t total = 0;
    for (double Lj : partition.lengths()) total += levels_below(Lj, E);
    return static_cast<double>(total) / partition.total_length();
}

/// N(E) = lambda e^{-c lambda/sqrt E} / (1 - e^{-c lambda/sqrt E}).
inline double ids_limit(const ModelParams& p, double E) {
    detail::require_positive(E, "E");
    const double a = c_const * p.lambda / std::sqrt(E);
    if (a > 700.0) return p.lambda * std::exp(-a);
    return p.lambda * std::exp(-a) / -std::expm1(-a);
}

/// lambda sum_s e^{-s c lambda/sqrt E}, stopped once the geometric tail
/// bound falls below tolerance times the accumulated value.
inline double ids_series(const ModelParams& p, double E, double tolerance) {
    detail::require_positive(E, "E");
    detail::require_positive(tolerance, "tolerance");
    const double ratio = std::exp(-c_const * p.lambda / std::sqrt(E));
    if (ratio == 0.0) return 0.0;
    CompensatedSum acc;
    double term = ratio;
    for (std::uint64_t s = 1; s < (1ull << 40); ++s) {
        acc += term;
        const double next = term * ratio;
        if (next / (1.0 - ratio) < tolerance * acc.value()) break;
        term = next;
    }
    return p.lambda * acc.value();
}

/// Free (lambda = 0) IDS, sqrt(2E)/pi.
inline double ids_free(double E) {
    detail::require_positive(E, "E");
    return std::sqrt(2.0 * E) / std::numbers::pi;
}

/// n(E) = dN/dE, evaluated in log space so that E -> 0 underflows to 0.
inline double dos_limit(const ModelParams& p, double E) {
    detail::require_positive(E, "E");
    const double a = c_const * p.lambda / std::sqrt(E);
    const double em = std::exp(-a);
    const double log_n = std::log(0.5 * p.lambda * p.lambda * c_const) - a - 1.5 * std::log(E) -
                         2.0 * std::log1p(-em);
    return std::exp(log_n);
}

/// Upper bound on the IDS for a finite impurity amplitude a, valid for
/// E < pi^2 a^2 / 32: lambda sum_s e^{-s lambda (c/sqrt E - 4/a)}.
inline double ids_finite_amplitude_bound(const ModelParams& p, double a, double E) {
    detail::require_positive(a, "amplitude");
    detail::require_positive(E, "E");
    const double e_max = std::numbers::pi * std::numbers::pi * a * a / 32.0;
    detail::require_domain(E < e_max, "E must lie below pi^2 a^2 / 32 = " + std::to_string(e_max));
    const double b = p.lambda * (c_const / std::sqrt(E) - 4.0 / a);
    if (b > 700.0) return p.lambda * std::exp(-b);
    return p.lambda * std::exp(-b) / -std::expm1(-b);
}

} // namespace lsbec
