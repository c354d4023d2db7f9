#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lsbec {

inline constexpr const char* version = "0.1.0";

/// c = pi/sqrt(2): with hbar = m = 1 the Dirichlet levels are (c s / L)^2.
inline constexpr double c_const = std::numbers::pi / std::numbers::sqrt2;
inline constexpr double c_squared = 0.5 * (std::numbers::pi * std::numbers::pi);

/// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double euler_gamma = 0.57721566490153286061;
/// zeta(3), used to seed ln^s moments of the exponential distribution.
inline constexpr double apery = 1.2020569031595942854;

/// Numeric failure (non-convergence, lost bracket). Carries the last bracket
/// when one exists.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what, double lo = NAN, double hi = NAN)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

inline void require_positive(double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0))
        throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

inline void require_domain(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error(msg);
}

} // namespace detail

/// Impurity intensity of the Poisson field. c is fixed (see c_const).
struct ModelParams {
    double lambda = 1.0;

    explicit ModelParams(double lam) : lambda(lam) { detail::require_positive(lam, "lambda"); }
};

/// Bose occupation 1/(e^x - 1) for x > 0, accurate for small x.
inline double bose(double x) { return 1.0 / std::expm1(x); }

} // namespace lsbec
