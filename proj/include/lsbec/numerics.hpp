#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lsbec/core.hpp"

namespace lsbec {

/// Neumaier (improved Kahan) accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// H_k - H_{first-1} = sum_{s=first}^{k} 1/s, compensated.
inline double harmonic_sum(std::size_t first, std::size_t last) {
    CompensatedSum acc;
    // smallest terms first
    for (std::size_t s = last; s >= first && s > 0; --s) acc += 1.0 / static_cast<double>(s);
    return acc.value();
}

struct Moments {
    double mean = 0.0;
    double std = 0.0;   // sample standard deviation (n-1)
    std::size_t count = 0;
};

/// Two-pass mean/std in input order; deterministic for a fixed ordering.
inline Moments moments(std::span<const double> xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return {NAN, NAN, 0};
    CompensatedSum s;
    for (double x : xs) s += x;
    m.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) {
        m.std = 0.0;
        return m;
    }
    CompensatedSum v;
    for (double x : xs) v += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(v.value() / static_cast<double>(xs.size() - 1));
    return m;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) return NAN;
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double relative_error(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

namespace quad {

struct Options {
    double rel_tol = 1e-13;
    unsigned max_depth = 12;
};

/// Adaptive Gauss-Kronrod (G15/K31) on a finite panel.
template <class F>
double panel(F&& f, double a, double b, const Options& opt = {}) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, opt.max_depth, opt.rel_tol, &err);
}

/// Sum of adaptive panels over consecutive breakpoints, compensated. Each
/// panel's tolerance is relative to the summed magnitude of all panels, so
/// panels that are negligible overall are not refined.
template <class F>
double panels(F&& f, std::span<const double> breaks, const Options& opt = {}) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const std::size_t n = breaks.size() < 2 ? 0 : breaks.size() - 1;
    std::vector<double> rough(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double err = 0.0;
        rough[i] = breaks[i + 1] > breaks[i] ? GK::integrate(f, breaks[i], breaks[i + 1], 0, 0.0, &err) : 0.0;
        scale += std::abs(rough[i]);
    }
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        if (rough[i] == 0.0 && scale > 0.0) continue;
        const double floor = 0.25 * opt.rel_tol * scale / static_cast<double>(n);
        const double tol = rough[i] == 0.0 ? opt.rel_tol : std::max(opt.rel_tol, floor / std::abs(rough[i]));
        double err = 0.0;
        acc += GK::integrate(f, breaks[i], breaks[i + 1], opt.max_depth, tol, &err);
    }
    return acc.value();
}

/// Breakpoints for an integrand on q in (0, inf) that is negligible below
/// q_lo and above q_hi: geometric up to q_knee, then linear panels.
inline std::vector<double> half_line_breaks(double q_lo, double q_knee, double q_hi,
                                            int geometric_per_decade = 4, int linear_panels = 8) {
    std::vector<double> b;
    q_knee = std::clamp(q_knee, q_lo, q_hi);
    b.push_back(0.0);
    if (q_lo > 0.0 && q_knee > q_lo) {
        const double decades = std::log10(q_knee / q_lo);
        const int n = std::max(1, static_cast<int>(std::ceil(decades * geometric_per_decade)));
        for (int i = 0; i < n; ++i) b.push_back(q_lo * std::pow(q_knee / q_lo, double(i) / n));
    }
    b.push_back(q_knee);
    if (q_hi > q_knee) {
        for (int i = 1; i <= linear_panels; ++i)
            b.push_back(q_knee + (q_hi - q_knee) * double(i) / linear_panels);
    }
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

} // namespace quad

/// Solve f(gap) = target for gap > 0 where f is strictly decreasing,
/// f -> +inf as gap -> 0+ and f -> 0 as gap -> inf. Bisection on log(gap),
/// so the result carries relative precision in gap.
template <class F>
double solve_gap(F&& f, double target, double initial_gap, int max_iter = 200) {
    double hi = initial_gap;
    int guard = 0;
    while (f(hi) > target) {
        hi *= 2.0;
        if (++guard > 2000 || !std::isfinite(hi))
            throw numeric_error("solve_gap: cannot bracket from above", initial_gap, hi);
    }
    double lo = std::min(initial_gap, hi);
    guard = 0;
    while (f(lo) < target) {
        lo *= 0.5;
        if (++guard > 2000 || lo < std::numeric_limits<double>::min())
            throw numeric_error("solve_gap: cannot bracket from below", lo, hi);
    }
    for (int it = 0; it < max_iter; ++it) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) return mid;
        if (f(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * lo) return std::sqrt(lo) * std::sqrt(hi);
    }
    throw numeric_error("solve_gap: iteration cap reached", lo, hi);
}

/// Bisection for an increasing function on [lo, hi] with f(lo) < target < f(hi).
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi, double abs_tol, int max_iter = 200) {
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi) || hi - lo <= abs_tol) return mid;
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    throw numeric_error("bisection: iteration cap reached", lo, hi);
}

} // namespace lsbec
