#pragma once

// Grand-canonical thermodynamics of the perfect Bose gas on an interval
// partition (finite volume) and in the self-averaging limit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/poisson_geometry.hpp"
#include "lsbec/spectrum.hpp"

namespace lsbec {

enum class ThermoMode { fixed_mu, fixed_rho };

/// (beta, mu) or (beta, rho), tagged with the independent variable.
struct ThermoPoint {
    double beta;
    ThermoMode mode;
    double value;

    static ThermoPoint at_mu(double beta, double mu) {
        detail::require_positive(beta, "beta");
        detail::require(std::isfinite(mu), "mu must be finite");
        return {beta, ThermoMode::fixed_mu, mu};
    }
    static ThermoPoint at_rho(double beta, double rho) {
        detail::require_positive(beta, "beta");
        detail::require_positive(rho, "rho");
        return {beta, ThermoMode::fixed_rho, rho};
    }
    double mu() const { return mode == ThermoMode::fixed_mu ? value : NAN; }
    double rho() const { return mode == ThermoMode::fixed_rho ? value : NAN; }
};

struct CondensateReport {
    double rho_c = 0.0;
    double rho_0 = 0.0;
    double mu_limit = 0.0;
};

namespace detail {

/// Sum over s >= 1 of term(s, E_s, x_s), x_s = beta (E_s - mu) > 0, for one
/// interval. |term| <= weight_bound * e^{-x}/(1 - e^{-x}) is assumed, which
/// gives a certified geometric bound on the remaining tail.
template <class Term>
double interval_level_sum(double Lj, double beta, double mu, Term&& term, double weight_bound,
                          double rel_tol = 1e-17) {
    const double b = beta * c_squared / (Lj * Lj);
    CompensatedSum acc;
    for (std::uint64_t s = 1;; ++s) {
        const double ratio = static_cast<double>(s) / Lj;
        const double E = c_squared * (ratio * ratio);
        const double x = beta * (E - mu);
        acc += term(s, E, x);
        const double rn = static_cast<double>(s + 1) / Lj;
        const double x_next = beta * (c_squared * (rn * rn) - mu);
        const double e_next = std::exp(-x_next);
        const double tail = weight_bound * e_next /
                            ((1.0 - e_next) * -std::expm1(-2.0 * b * static_cast<double>(s + 1)));
        if (tail <= rel_tol * std::abs(acc.value()) || tail < std::numeric_limits<double>::min())
            break;
        if (s > 100000000ull) throw numeric_error("level sum did not converge");
    }
    return acc.value();
}

inline void require_below_bottom(double mu, double bottom) {
    require_domain(mu < bottom, "mu = " + std::to_string(mu) + " must lie below the spectral bottom " +
                                    std::to_string(bottom));
}

/// 2 q n(q^2): the density of states in the q = sqrt(E) variable,
/// lambda^2 c e^{-a}/(q^2 (1 - e^{-a})^2) with a = c lambda / q.
inline double dos_weight_q(double lambda, double q) {
    if (!(q > 0.0)) return 0.0;
    const double a = c_const * lambda / q;
    if (a > 740.0) return 0.0;
    const double em = std::exp(-a);
    return std::exp(2.0 * std::log(lambda) + std::log(c_const) - a - 2.0 * std::log(q) -
                    2.0 * std::log1p(-em));
}

/// Panel layout for integrals of dos_weight_q(q) times a Bose-type factor.
inline std::vector<double> limit_breaks(double lambda, double beta, double mu) {
    const double q_lo = c_const * lambda / 740.0;
    const double knee2 = std::max(0.0, -mu) + 1.0 / beta;
    const double q_knee = std::sqrt(knee2);
    const double q_hi = std::sqrt(knee2 + 64.0 / beta);
    return quad::half_line_breaks(q_lo, q_knee, q_hi);
}

/// int_0^inf dE n(E) f(E) with E = q^2.
template <class F>
double limit_integral(double lambda, double beta, double mu, F&& f) {
    const auto breaks = limit_breaks(lambda, beta, mu);
    auto g = [&](double q) {
        const double w = dos_weight_q(lambda, q);
        return w == 0.0 ? 0.0 : w * f(q * q);
    };
    return quad::panels(g, breaks);
}

} // namespace detail

/// Bottom of the spectrum of the partition: the ground level of the
/// largest interval.
inline double spectral_bottom(const IntervalPartition& partition) {
    return dirichlet_eigenvalue(partition.largest(), 1);
}

/// p_L = -(1/(beta L)) sum_j sum_s ln(1 - e^{-beta(E_s(L_j) - mu)}).
inline double pressure_finite(const IntervalPartition& partition, double beta, double mu) {
    detail::require_positive(beta, "beta");
    detail::require_below_bottom(mu, spectral_bottom(partition));
    auto term = [](std::uint64_t, double, double x) { return -std::log1p(-std::exp(-x)); };
    CompensatedSum acc;
    for (double Lj : partition.lengths()) acc += detail::interval_level_sum(Lj, beta, mu, term, 1.0);
    return acc.value() / (beta * partition.total_length());
}

/// rho_L = (1/L) sum_j sum_s 1/(e^{beta(E_s(L_j) - mu)} - 1).
inline double density_finite(const IntervalPartition& partition, double beta, double mu) {
    detail::require_positive(beta, "beta");
    detail::require_below_bottom(mu, spectral_bottom(partition));
    auto term = [](std::uint64_t, double, double x) { return bose(x); };
    CompensatedSum acc;
    for (double Lj : partition.lengths()) acc += detail::interval_level_sum(Lj, beta, mu, term, 1.0);
    return acc.value() / partition.total_length();
}

/// Limiting pressure -(1/beta) int n(E) ln(1 - e^{-beta(E - mu)}) dE, mu < 0.
inline double pressure_limit(const ModelParams& p, double beta, double mu) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu < 0.0, "pressure_limit requires mu < 0");
    const double v = detail::limit_integral(p.lambda, beta, mu, [&](double E) {
        return -std::log1p(-std::exp(-beta * (E - mu)));
    });
    return v / beta;
}

/// Limiting density int n(E)/(e^{beta(E - mu)} - 1) dE, mu <= 0.
inline double density_limit(const ModelParams& p, double beta, double mu) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu <= 0.0, "density_limit requires mu <= 0");
    return detail::limit_integral(p.lambda, beta, mu, [&](double E) { return bose(beta * (E - mu)); });
}

/// rho_c(beta): the density at mu = 0, finite because of the Lifshitz tail.
inline double critical_density(const ModelParams& p, double beta) { return density_limit(p, beta, 0.0); }

/// rho_c by parts: int N(E) beta e^{beta E}/(e^{beta E} - 1)^2 dE.
inline double critical_density_by_parts(const ModelParams& p, double beta) {
    detail::require_positive(beta, "beta");
    const auto breaks = detail::limit_breaks(p.lambda, beta, 0.0);
    auto g = [&](double q) {
        if (!(q > 0.0)) return 0.0;
        const double a = c_const * p.lambda / q;
        if (a > 740.0) return 0.0;
        const double N = p.lambda * std::exp(-a) / -std::expm1(-a);
        const double sh = std::sinh(0.5 * beta * q * q);
        return 2.0 * q * N * beta / (4.0 * sh * sh);
    };
    return quad::panels(g, breaks);
}

/// Unique mu below the spectral bottom with density_finite(mu) == rho.
/// Bisection runs on the gap E_min - mu in log scale.
inline double solve_mu_finite(const IntervalPartition& partition, double beta, double rho) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    const double bottom = spectral_bottom(partition);
    auto f = [&](double gap) { return density_finite(partition, beta, bottom - gap); };
    try {
        const double gap = solve_gap(f, rho, 1.0 / beta);
        return bottom - gap;
    } catch (const numeric_error& e) {
        throw numeric_error(std::string("solve_mu_finite: ") + e.what(), bottom - e.bracket_hi(),
                            bottom - e.bracket_lo());
    }
}

/// Limiting chemical potential: the root of density_limit(mu) = rho when
/// rho < rho_c, else 0.
inline double solve_mu_limit(const ModelParams& p, double beta, double rho, std::optional<double> rho_c = {}) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    const double rc = rho_c ? *rho_c : critical_density(p, beta);
    if (rho >= rc) return 0.0;
    auto f = [&](double mu) { return density_limit(p, beta, mu); };
    double lo = -1.0 / beta;
    int guard = 0;
    while (f(lo) > rho) {
        lo *= 2.0;
        if (++guard > 200) throw numeric_error("solve_mu_limit: cannot bracket", lo, 0.0);
    }
    return bisect_increasing(f, rho, lo, 0.0, 1e-15 * std::max(1.0, std::abs(lo)));
}

inline CondensateReport condensate_density(const ModelParams& p, double beta, double rho) {
    detail::require_positive(rho, "rho");
    CondensateReport r;
    r.rho_c = critical_density(p, beta);
    r.rho_0 = std::max(0.0, rho - r.rho_c);
    r.mu_limit = solve_mu_limit(p, beta, rho, r.rho_c);
    return r;
}

/// Occupation density of all levels with E < epsilon at mu = mu_L.
inline double occupation_below(const IntervalPartition& partition, double beta, double mu, double epsilon) {
    CompensatedSum acc;
    for (double Lj : partition.lengths()) {
        for (std::uint64_t s = 1;; ++s) {
            const double ratio = static_cast<double>(s) / Lj;
            const double E = c_squared * (ratio * ratio);
            if (!(E < epsilon)) break;
            acc += bose(beta * (E - mu));
        }
    }
    return acc.value() / partition.total_length();
}

/// Finite-volume condensate: occupation below epsilon at the mu_L solving
/// density_finite(mu_L) = rho.
inline double condensate_finite(const IntervalPartition& partition, double beta, double rho, double epsilon) {
    detail::require_positive(epsilon, "epsilon");
    const double mu = solve_mu_finite(partition, beta, rho);
    return occupation_below(partition, beta, mu, epsilon);
}

/// Upper bound I(beta, lambda, a) on the critical density for a finite
/// impurity amplitude a, split at E~(a) = (pi a / 8)^2.
inline double critical_density_bound(const ModelParams& p, double beta, double a) {
    detail::require_positive(beta, "beta");
    detail::require_positive(a, "amplitude");
    const double q_split = std::numbers::pi * a / 8.0;
    auto weight = [beta](double E) {
        const double sh = std::sinh(0.5 * beta * E);
        return beta / (4.0 * sh * sh);
    };
    auto low = [&](double q) {
        if (!(q > 0.0)) return 0.0;
        const double b = p.lambda * (c_const / q - 4.0 / a);
        if (b > 740.0) return 0.0;
        const double N = p.lambda * std::exp(-b) / -std::expm1(-b);
        return 2.0 * q * N * weight(q * q);
    };
    auto high = [&](double q) { return 2.0 * q * (q / c_const) * weight(q * q); };

    // On the low side the integrand vanishes faster than any power as q -> 0.
    const double q_lo = std::min(q_split, c_const * p.lambda / 740.0);
    const auto low_breaks = quad::half_line_breaks(q_lo, q_split, q_split);
    const double knee = std::max(q_split, std::sqrt(1.0 / beta));
    std::vector<double> high_breaks{q_split};
    for (double f = 2.0; q_split * f < knee; f *= 2.0) high_breaks.push_back(q_split * f);
    const double q_hi = std::sqrt(knee * knee + 64.0 / beta);
    for (int i = 0; i <= 8; ++i) high_breaks.push_back(knee + (q_hi - knee) * i / 8.0);
    high_breaks.erase(std::unique(high_breaks.begin(), high_breaks.end()), high_breaks.end());
    std::sort(high_breaks.begin(), high_breaks.end());
    return quad::panels(low, low_breaks) + quad::panels(high, high_breaks);
}

} // namespace lsbec
