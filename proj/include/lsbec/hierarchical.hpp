#pragma once

// Nonrandom hierarchical interval layouts: a few (or logarithmically many)
// large intervals embedded in a sea of identical short ones. They realise
// type I, II and III generalized condensation in one dimension.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/poisson_geometry.hpp"

namespace lsbec {

enum class HierarchyKind { TypeI, TypeII, TypeIII };

inline const char* to_string(HierarchyKind k) {
    switch (k) {
    case HierarchyKind::TypeI: return "TypeI";
    case HierarchyKind::TypeII: return "TypeII";
    case HierarchyKind::TypeIII: return "TypeIII";
    }
    return "?";
}

struct HierarchicalLayout {
    HierarchyKind kind = HierarchyKind::TypeI;
    double total_length = 0.0;
    double lambda = 1.0;
    std::uint64_t interval_count = 0;  // n = floor(lambda L)
    std::uint64_t large_count = 0;     // M, 1 or M_n = floor(ln(n + 1))
    double large_length = 0.0;
    double small_length = 0.0;

    std::uint64_t small_count() const { return interval_count - large_count; }
    double ground_energy() const { return c_squared / (large_length * large_length); }

    /// The layout as an explicit partition, large intervals first.
    IntervalPartition to_partition() const {
        std::vector<double> lengths(interval_count, small_length);
        std::fill_n(lengths.begin(), large_count, large_length);
        return IntervalPartition::from_lengths(std::move(lengths));
    }
};

/// Layout of n = floor(lambda L) intervals. `large_count` is used by TypeI
/// only; TypeII has one large interval and TypeIII has floor(ln(n + 1)).
inline HierarchicalLayout build_layout(HierarchyKind kind, double L, double lambda, std::uint64_t large_count = 1) {
    detail::require_positive(L, "L");
    detail::require_positive(lambda, "lambda");
    HierarchicalLayout h;
    h.kind = kind;
    h.total_length = L;
    h.lambda = lambda;
    const double n_real = std::floor(lambda * L);
    detail::require(n_real >= 2.0 && n_real < 9.0e15, "lambda L must give between 2 and 9e15 intervals");
    h.interval_count = static_cast<std::uint64_t>(n_real);
    switch (kind) {
    case HierarchyKind::TypeI:
        detail::require(large_count >= 1, "large_count must be >= 1");
        h.large_count = large_count;
        h.large_length = std::log(lambda * L) / lambda;
        break;
    case HierarchyKind::TypeII:
        h.large_count = 1;
        h.large_length = std::sqrt(L / lambda);
        break;
    case HierarchyKind::TypeIII:
        h.large_count = static_cast<std::uint64_t>(std::floor(std::log(n_real + 1.0)));
        h.large_length = std::log(lambda * L) / lambda;
        break;
    }
    detail::require(h.large_count >= 1, "layout needs at least one large interval");
    detail::require(h.large_count < h.interval_count,
                    "layout needs at least one small interval: large_count must be < floor(lambda L)");
    detail::require(h.large_length > 0.0, "large_length must be positive: need lambda L > 1");
    const double M = static_cast<double>(h.large_count);
    h.small_length = (L - M * h.large_length) / (n_real - M);
    detail::require(h.small_length > 0.0, "small_length must be positive: L - M large_length <= 0");
    detail::require(h.large_length > h.small_length,
                    "large_length must exceed small_length; increase L");
    return h;
}

namespace detail {

/// sum_s visit(s, 1/(e^{x_s} - 1)) with x_s = beta (kappa (s^2 - 1) + d1),
/// kappa = c^2 / Lj^2 and d1 = E_1 - mu > 0 supplied directly so that a small
/// gap is never formed by cancellation. Certified geometric tail.
template <class Visit>
double tower_sum(double Lj, double beta, double d1, Visit&& visit, double rel_tol = 1e-17) {
    const double kappa = c_squared / (Lj * Lj);
    const double b = beta * kappa;
    CompensatedSum acc;
    for (std::uint64_t s = 1;; ++s) {
        const double sd = static_cast<double>(s);
        const double x = beta * (kappa * (sd * sd - 1.0) + d1);
        const double occ = bose(x);
        visit(s, occ);
        acc += occ;
        const double sn = sd + 1.0;
        const double x_next = beta * (kappa * (sn * sn - 1.0) + d1);
        const double e_next = std::exp(-x_next);
        const double tail = e_next / ((1.0 - e_next) * -std::expm1(-2.0 * b * sn));
        if (tail <= rel_tol * acc.value() || tail < std::numeric_limits<double>::min()) break;
        if (s > 100000000ull) throw numeric_error("hierarchical level sum did not converge");
    }
    return acc.value();
}

/// Density at gap = E_ground - mu > 0.
inline double hierarchical_density_gap(const HierarchicalLayout& h, double beta, double gap) {
    auto none = [](std::uint64_t, double) {};
    const double eg = h.ground_energy();
    const double d_small = c_squared / (h.small_length * h.small_length) - eg + gap;
    const double large = tower_sum(h.large_length, beta, gap, none);
    const double small = tower_sum(h.small_length, beta, d_small, none);
    return (static_cast<double>(h.large_count) * large + static_cast<double>(h.small_count()) * small) /
           h.total_length;
}

/// Gap E_ground - mu_L solving hierarchical_density = rho.
inline double solve_gap_hierarchical(const HierarchicalLayout& h, double beta, double rho) {
    auto f = [&](double gap) { return hierarchical_density_gap(h, beta, gap); };
    return solve_gap(f, rho, 1.0 / beta);
}

} // namespace detail

/// rho_L = (M/L) sum_s n_B(E_s(L_1)) + ((n - M)/L) sum_s n_B(E_s(L~)).
inline double hierarchical_density(const HierarchicalLayout& h, double beta, double mu) {
    detail::require_positive(beta, "beta");
    const double eg = h.ground_energy();
    detail::require_domain(mu < eg, "mu = " + std::to_string(mu) + " must lie below the ground energy " +
                                        std::to_string(eg));
    return detail::hierarchical_density_gap(h, beta, eg - mu);
}

/// lambda sum_s 1/(e^{beta (c lambda s)^2} - 1): the small intervals tend to
/// length 1/lambda, so their levels tend to (c lambda s)^2.
inline double hierarchical_critical_density(double lambda, double beta) {
    detail::require_positive(lambda, "lambda");
    detail::require_positive(beta, "beta");
    auto none = [](std::uint64_t, double) {};
    return lambda * detail::tower_sum(1.0 / lambda, beta, c_squared * lambda * lambda, none);
}

/// Chemical potential solving hierarchical_density(mu) = rho.
inline double solve_mu_hierarchical(const HierarchicalLayout& h, double beta, double rho) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    try {
        return h.ground_energy() - detail::solve_gap_hierarchical(h, beta, rho);
    } catch (const numeric_error& e) {
        throw numeric_error(std::string("solve_mu_hierarchical: ") + e.what(), e.bracket_lo(), e.bracket_hi());
    }
}

/// beta (E_ground - mu_L) L, the finite-size scaling variable of the gap.
inline double scaled_gap(const HierarchicalLayout& h, double beta, double rho) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    return beta * detail::solve_gap_hierarchical(h, beta, rho) * h.total_length;
}

namespace detail {

/// sum_{s>=1} 1/(s^2 - w) for real w < 1.
inline double shifted_basel(double w) {
    constexpr double pi = std::numbers::pi;
    if (std::abs(w) < 1e-3) {
        // sum_k zeta(2k + 2) w^k
        constexpr double z[] = {pi * pi / 6.0, pi * pi * pi * pi / 90.0, 1.0173430619844491, 1.0040773561979443,
                                1.0009945751278181};
        return z[0] + w * (z[1] + w * (z[2] + w * (z[3] + w * z[4])));
    }
    if (w > 0.0) {
        const double zz = std::sqrt(w);
        const double delta = (1.0 - w) / (1.0 + zz);  // 1 - z without cancellation
        // cot(pi z) = -cot(pi delta)
        return 0.5 / w + pi / (2.0 * zz * std::tan(pi * delta));
    }
    const double y = std::sqrt(-w);
    const double py = pi * y;
    return (py / std::tanh(py) - 1.0) / (2.0 * -w);
}

} // namespace detail

/// Type II condensate split: sum_{s>=1} 1/(beta lambda c^2 (s^2 - 1) + A).
inline double type2_condensate(double lambda, double beta, double A) {
    detail::require_positive(A, "A");
    const double b = beta * lambda * c_squared;
    return detail::shifted_basel(1.0 - A / b) / b;
}

/// The A > 0 with rho - rho_c = type2_condensate(lambda, beta, A).
inline double solve_type2_A(double lambda, double beta, double rho, std::optional<double> rho_c = {}) {
    detail::require_positive(lambda, "lambda");
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    const double rc = rho_c ? *rho_c : hierarchical_critical_density(lambda, beta);
    detail::require_domain(rho > rc, "solve_type2_A requires rho > rho_c = " + std::to_string(rc));
    auto f = [&](double A) { return type2_condensate(lambda, beta, A); };
    return solve_gap(f, rho - rc, beta * lambda * c_squared);
}

enum class IntervalClass { large, small };

struct OccupationEntry {
    IntervalClass interval_class = IntervalClass::large;
    std::uint64_t interval = 0;  // index among the large intervals; 0 for the small class
    std::uint64_t s = 1;
    double density = 0.0;        // occupation of one state divided by L
    std::uint64_t multiplicity = 1;
};

struct OccupationProfile {
    std::vector<OccupationEntry> entries;
    double mu_used = 0.0;
    double gap = 0.0;
    double total_length = 0.0;
    double rho = 0.0;
    double rho_c = 0.0;

    double total() const {
        CompensatedSum acc;
        for (const auto& e : entries) acc += e.density * static_cast<double>(e.multiplicity);
        return acc.value();
    }
};

/// Per-state occupation densities at mu = solve_mu_hierarchical. Each large
/// interval is listed separately; identical small intervals share one entry
/// per level with multiplicity n - M.
inline OccupationProfile occupation_profile(const HierarchicalLayout& h, double beta, double rho) {
    detail::require_positive(beta, "beta");
    detail::require_positive(rho, "rho");
    OccupationProfile p;
    p.total_length = h.total_length;
    p.rho = rho;
    p.rho_c = hierarchical_critical_density(h.lambda, beta);
    p.gap = detail::solve_gap_hierarchical(h, beta, rho);
    p.mu_used = h.ground_energy() - p.gap;
    const double invL = 1.0 / h.total_length;
    std::vector<double> large_levels;
    detail::tower_sum(h.large_length, beta, p.gap, [&](std::uint64_t, double occ) { large_levels.push_back(occ); });
    for (std::uint64_t j = 0; j < h.large_count; ++j)
        for (std::size_t i = 0; i < large_levels.size(); ++i)
            p.entries.push_back({IntervalClass::large, j, i + 1, large_levels[i] * invL, 1});
    const double d_small = c_squared / (h.small_length * h.small_length) - h.ground_energy() + p.gap;
    detail::tower_sum(h.small_length, beta, d_small, [&](std::uint64_t s, double occ) {
        p.entries.push_back({IntervalClass::small, 0, s, occ * invL, h.small_count()});
    });
    return p;
}

enum class CondensateType { TypeI, TypeII, TypeIII, None, Indeterminate };

inline const char* to_string(CondensateType t) {
    switch (t) {
    case CondensateType::TypeI: return "TypeI";
    case CondensateType::TypeII: return "TypeII";
    case CondensateType::TypeIII: return "TypeIII";
    case CondensateType::None: return "None";
    case CondensateType::Indeterminate: return "Indeterminate";
    }
    return "?";
}

/// Summary of one profile against the threshold theta.
struct ProfileSignal {
    std::size_t macro_states = 0;     // states with density > theta
    std::size_t macro_intervals = 0;  // intervals holding at least one of them
    double max_state = 0.0;           // largest single-state density
    double large_total = 0.0;         // density carried by the large intervals
};

inline ProfileSignal profile_signal(const OccupationProfile& p, double theta) {
    ProfileSignal sig;
    std::map<std::pair<int, std::uint64_t>, int> per_interval;
    for (const auto& e : p.entries) {
        sig.max_state = std::max(sig.max_state, e.density);
        if (e.interval_class == IntervalClass::large) sig.large_total += e.density;
        if (e.density > theta) {
            sig.macro_states += e.multiplicity;
            per_interval[{static_cast<int>(e.interval_class), e.interval}] += 1;
        }
    }
    sig.macro_intervals = per_interval.size();
    return sig;
}

struct Classification {
    CondensateType type = CondensateType::Indeterminate;
    std::string reason;
    std::vector<ProfileSignal> signals;
};

/// Condensation type from profiles at increasing L, all at the same rho.
/// A state is macroscopic when its density exceeds theta = 0.01 (rho - rho_c)
/// at both of the two largest L. Then:
///   several macroscopic states in one interval            -> TypeII
///   one per interval, interval count fixed along the ladder  -> TypeI
///   one per interval, interval count growing with L          -> TypeIII
///   none, with the large intervals still holding rho - rho_c -> TypeIII
///   none, and the large-interval density vanishing           -> None
/// Anything else is Indeterminate.
inline Classification classify_condensate(const std::vector<OccupationProfile>& profiles) {
    detail::require(profiles.size() >= 3, "classification needs at least 3 profiles");
    for (std::size_t i = 1; i < profiles.size(); ++i)
        detail::require(profiles[i].total_length > profiles[i - 1].total_length,
                        "profiles must be ordered by increasing L");
    Classification out;
    const double rho0 = profiles.back().rho - profiles.back().rho_c;
    if (!(rho0 > 0.0)) {
        out.type = CondensateType::None;
        out.reason = "rho <= rho_c";
        return out;
    }
    const double theta = 0.01 * rho0;
    for (const auto& p : profiles) out.signals.push_back(profile_signal(p, theta));

    const auto& prev = profiles[profiles.size() - 2];
    const auto& last = profiles.back();
    using Key = std::tuple<int, std::uint64_t, std::uint64_t>;
    auto macro_keys = [&](const OccupationProfile& p) {
        std::map<Key, double> keys;
        for (const auto& e : p.entries)
            if (e.density > theta) keys[{static_cast<int>(e.interval_class), e.interval, e.s}] = e.density;
        return keys;
    };
    const auto a = macro_keys(prev);
    const auto b = macro_keys(last);
    std::map<std::pair<int, std::uint64_t>, int> persistent;
    for (const auto& [k, v] : b)
        if (a.count(k)) persistent[{std::get<0>(k), std::get<1>(k)}] += 1;

    const auto& sig = out.signals;
    const std::size_t n = sig.size();
    if (persistent.empty()) {
        const bool shrinking = sig[n - 1].max_state < sig[n - 2].max_state;
        if (sig[n - 1].large_total >= 0.5 * rho0 && shrinking) {
            out.type = CondensateType::TypeIII;
            out.reason = "no macroscopic state, large intervals still hold the condensate";
        } else if (sig[n - 1].large_total < sig[n - 2].large_total && sig[n - 1].large_total < theta) {
            out.type = CondensateType::None;
            out.reason = "no macroscopic state and no condensate";
        } else {
            out.reason = "no macroscopic state but ambiguous large-interval trend";
        }
        return out;
    }
    int per_interval_max = 0;
    for (const auto& [k, cnt] : persistent) per_interval_max = std::max(per_interval_max, cnt);

    if (per_interval_max >= 2) {
        if (persistent.size() == 1) {
            out.type = CondensateType::TypeII;
            out.reason = std::to_string(per_interval_max) + " macroscopic states in one interval";
        } else {
            out.reason = "several macroscopic states in several intervals";
        }
        return out;
    }
    bool growing = true, constant_top = sig[n - 1].macro_intervals == sig[n - 2].macro_intervals;
    for (std::size_t i = 1; i < n; ++i) growing &= sig[i].macro_intervals > sig[i - 1].macro_intervals;
    if (growing) {
        out.type = CondensateType::TypeIII;
        out.reason = "one macroscopic state per interval, interval count growing with L";
    } else if (constant_top && persistent.size() == sig[n - 1].macro_intervals) {
        out.type = CondensateType::TypeI;
        out.reason = std::to_string(persistent.size()) + " macroscopic ground state(s), count fixed";
    } else {
        out.reason = "non-monotone interval count along the ladder";
    }
    return out;
}

} // namespace lsbec
