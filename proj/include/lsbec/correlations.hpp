#pragma once

// Space-averaged one-body reduced density matrix: finite-volume evaluation on
// a partition, its self-averaging limit, the free-gas kernel, and the
// condensate (ODLRO) plateau.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/poisson_geometry.hpp"
#include "lsbec/spectrum.hpp"
#include "lsbec/thermodynamics.hpp"

namespace lsbec {

/// Kernel query at separation r = |x - y|; mu or rho as in ThermoPoint.
struct KernelQuery {
    double separation;
    ThermoPoint point;

    KernelQuery(double r, ThermoPoint p) : separation(r), point(p) {
        detail::require(std::isfinite(r) && r >= 0.0, "separation must be >= 0");
    }
};

/// Translation average over one Dirichlet box of length L of
/// psi_s(z + r) psi_s(z): (1 - r/L) cos(k r) + sin(k r)/(k L), k = pi s / L,
/// and zero once r >= L.
inline double box_average_weight(double L, std::uint64_t s, double r) {
    if (!(r < L)) return 0.0;
    const double k = std::numbers::pi * static_cast<double>(s) / L;
    const double kr = k * r;
    return (1.0 - r / L) * std::cos(kr) + std::sin(kr) / (k * L);
}

/// Space-averaged kernel on a partition at separation r.
inline double kernel_finite(const IntervalPartition& partition, double beta, double mu, double r) {
    detail::require_positive(beta, "beta");
    detail::require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
    detail::require_below_bottom(mu, spectral_bottom(partition));
    constexpr double weight_bound = 1.0 + 1.0 / std::numbers::pi;
    CompensatedSum acc;
    for (double Lj : partition.lengths()) {
        if (!(Lj > r)) continue;
        auto term = [&](std::uint64_t s, double, double x) { return bose(x) * box_average_weight(Lj, s, r); };
        acc += detail::interval_level_sum(Lj, beta, mu, term, weight_bound);
    }
    return acc.value() / partition.total_length();
}

namespace detail {

/// Integrand of the limiting kernel in q = sqrt(E) with the sum over Dirichlet
/// quantum numbers done in closed form. With a = c lambda / q and
/// x = q r / c = m + f (m integer, 0 <= f < 1):
///   sum_{s > x} e^{-a s} [(s - x) cos(pi x) + sin(pi x)/pi]
///     = (-1)^m e^{-a(m+1)} [ (1/(1-e^{-a})^2 - f/(1-e^{-a})) cos(pi f)
///                            + sin(pi f)/(pi (1-e^{-a})) ].
inline double kernel_q_integrand(double lambda, double beta, double mu, double r, double q) {
    if (!(q > 0.0)) return 0.0;
    const double a = c_const * lambda / q;
    const double x = q * r / c_const;
    const double m = std::floor(x);
    const double f = x - m;
    const double expo = a * (m + 1.0);
    if (expo > 740.0) return 0.0;
    const double em = std::exp(-a);
    const double inv = 1.0 / -std::expm1(-a);
    double bracket;
    if (f <= 0.5) {
        bracket = (inv * inv - f * inv) * std::cos(std::numbers::pi * f) +
                  inv * std::sin(std::numbers::pi * f) / std::numbers::pi;
    } else {
        // With g = 1 - f the bracket is -e^{-a} inv^2 cos(pi g) + inv (sin y - y cos y)/pi,
        // y = pi g; the last factor vanishes like y^3 and is summed as a series.
        const double g = 1.0 - f;
        const double y = std::numbers::pi * g;
        double tail;
        if (y < 0.5) {
            // sin y - y cos y = sum_{n>=1} (-1)^{n+1} 2n y^{2n+1} / (2n+1)!
            tail = 0.0;
            double pw = y * y * y / 6.0;  // y^{2n+1}/(2n+1)! at n = 1
            for (int n = 1; n <= 10; ++n) {
                tail += (n % 2 ? 1.0 : -1.0) * 2.0 * n * pw;
                pw *= y * y / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
            }
        } else {
            tail = std::sin(y) - y * std::cos(y);
        }
        bracket = -em * inv * inv * std::cos(y) + inv * tail / std::numbers::pi;
    }
    const double sign = std::fmod(m, 2.0) == 0.0 ? 1.0 : -1.0;
    const double pref = std::exp(2.0 * std::log(lambda) + std::log(c_const) - expo - 2.0 * std::log(q));
    return sign * pref * bose(beta * (q * q - mu)) * bracket;
}

/// Limiting kernel by q-quadrature, mu <= 0. Panels break where q r / c is
/// an integer, so each panel carries half an oscillation.
inline double kernel_limit_quadrature(double lambda, double beta, double mu, double r) {
    if (r == 0.0)
        return limit_integral(lambda, beta, mu, [&](double E) { return bose(beta * (E - mu)); });
    auto breaks = limit_breaks(lambda, beta, mu);
    const double q_hi = breaks.back();
    const double step = c_const / r;
    for (double m = 1.0; m * step < q_hi; m += 1.0) breaks.push_back(m * step);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto g = [&](double q) { return kernel_q_integrand(lambda, beta, mu, r, q); };
    return quad::panels(g, breaks);
}

} // namespace detail

/// Self-averaging limit of kernel_finite for mu < 0, by q-quadrature.
inline double kernel_limit(const ModelParams& p, double beta, double mu, double r) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu < 0.0, "kernel_limit requires mu < 0");
    detail::require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
    return detail::kernel_limit_quadrature(p.lambda, beta, mu, r);
}

/// Second route to kernel_limit: the sum over quantum numbers s of the
/// expectation over an Exponential(lambda) box length,
///   lambda^2 sum_s int_r^inf dL e^{-lambda L} n_B(E_s(L)) w_s(L, r).
/// Each s-integral is split at the zeros of cos(pi s r / L). Practical for
/// lambda of order one; cost grows like 1/lambda.
inline double kernel_limit_series(const ModelParams& p, double beta, double mu, double r) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu <= 0.0, "kernel_limit_series requires mu <= 0");
    detail::require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
    const double lam = p.lambda;
    const double L_far = r + 80.0 / lam;
    CompensatedSum total;
    int small_run = 0;
    for (std::uint64_t s = 1; s < 1000000; ++s) {
        const double sd = static_cast<double>(s);
        auto g = [&](double L) {
            if (!(L > r)) return 0.0;
            const double ratio = sd / L;
            const double x = beta * (c_squared * ratio * ratio - mu);
            if (x > 745.0) return 0.0;
            return std::exp(-lam * L) * bose(x) * box_average_weight(L, s, r);
        };
        // The Bose factor is negligible for L below sqrt(beta c^2 s^2 / 745).
        const double L_min = std::max(r, sd * std::sqrt(beta * c_squared / 745.0));
        std::vector<double> breaks{L_min};
        if (r > 0.0) {
            // cos(pi s r / L) = 0 at L = 2 s r / (2j + 1)
            for (std::uint64_t j = 2 * s; j-- > 0;) {
                const double Lj = 2.0 * sd * r / (2.0 * static_cast<double>(j) + 1.0);
                if (Lj > L_min && Lj < L_far) breaks.push_back(Lj);
            }
        }
        const double peak = std::cbrt(2.0 * beta * c_squared * sd * sd / lam);
        for (double extra : {0.5 * peak, peak, 2.0 * peak, 4.0 * peak})
            if (extra > L_min && extra < L_far) breaks.push_back(extra);
        for (int i = 1; i <= 16; ++i) breaks.push_back(L_min + (L_far - L_min) * i / 16.0);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        const double term = quad::panels(g, breaks);
        total += term;
        // Terms decay like exp(-(s^2)^{1/3}); stop after a run of negligible ones.
        if (std::abs(term) <= 1e-17 * std::abs(total.value()))
            ++small_run;
        else
            small_run = 0;
        if (small_run >= 4) break;
    }
    return lam * lam * total.value();
}

/// Free perfect Bose gas kernel (1/pi) int_0^inf dk cos(k r)/(e^{beta(k^2/2 - mu)} - 1), mu < 0.
inline double free_kernel(double beta, double mu, double r) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu < 0.0, "free_kernel requires mu < 0");
    detail::require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
    const double knee = std::sqrt(2.0 * (-mu + 1.0 / beta));
    const double k_hi = std::sqrt(2.0 * (-mu + 1.0 / beta + 64.0 / beta));
    std::vector<double> breaks{0.0};
    for (int i = 1; i <= 4; ++i) breaks.push_back(knee * i / 4.0);
    for (int i = 1; i <= 8; ++i) breaks.push_back(knee + (k_hi - knee) * i / 8.0);
    if (r > 0.0)
        for (double j = 0.0; (j + 0.5) * std::numbers::pi / r < k_hi; j += 1.0)
            breaks.push_back((j + 0.5) * std::numbers::pi / r);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto g = [&](double k) { return bose(beta * (0.5 * k * k - mu)) * std::cos(k * r); };
    return quad::panels(g, breaks) / std::numbers::pi;
}

/// ODLRO: the large-separation plateau max(0, rho - rho_c).
inline double odlro(const ModelParams& p, double beta, double rho, std::optional<double> rho_c = {}) {
    detail::require_positive(rho, "rho");
    const double rc = rho_c ? *rho_c : critical_density(p, beta);
    return std::max(0.0, rho - rc);
}

/// Limiting kernel at fixed density: below rho_c it is kernel_limit at the
/// solved mu; above, the condensate adds rho - rho_c on top of the mu = 0 kernel.
inline double kernel_with_condensate(const ModelParams& p, double beta, double rho, double r,
                                     std::optional<double> rho_c = {}) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    detail::require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
    if (r == 0.0) return rho;
    const double rc = rho_c ? *rho_c : critical_density(p, beta);
    if (rho > rc) {
        return (rho - rc) + detail::kernel_limit_quadrature(p.lambda, beta, 0.0, r);
    }
    const double mu = solve_mu_limit(p, beta, rho, rc);
    return detail::kernel_limit_quadrature(p.lambda, beta, mu, r);
}

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::pair<double, double>> samples;  // (r, ln(kernel_limit/free_kernel))
};

/// Least-squares slope of ln(kernel_limit/free_kernel) over [lo, hi], sampled
/// every `spacing`. The lower edge must sit in the asymptotic regime,
/// lo >= 5 / min(lambda, sqrt(2|mu|)).
inline DecayFit decay_rate_fit(const ModelParams& p, double beta, double mu, std::pair<double, double> window,
                               double spacing = 0.5) {
    detail::require_positive(beta, "beta");
    detail::require_domain(mu < 0.0, "decay_rate_fit requires mu < 0");
    detail::require_positive(spacing, "spacing");
    const auto [lo, hi] = window;
    detail::require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "window must be increasing");
    const double edge = 5.0 / std::min(p.lambda, std::sqrt(2.0 * -mu));
    detail::require(lo >= edge * (1.0 - 1e-12),
                    "window lower edge must be >= 5/min(lambda, sqrt(2|mu|)) = " + std::to_string(edge));
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
    detail::require(n >= 5, "window too narrow: fewer than 5 sample points");
    DecayFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = lo + spacing * static_cast<double>(i);
        const double k = kernel_limit(p, beta, mu, r);
        const double f = free_kernel(beta, mu, r);
        if (!(k > 0.0 && f > 0.0)) throw numeric_error("decay_rate_fit: non-positive kernel in window");
        const double y = std::log(k / f);
        fit.samples.emplace_back(r, y);
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
    }
    const double nn = static_cast<double>(n);
    fit.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / nn;
    return fit;
}

} // namespace lsbec
