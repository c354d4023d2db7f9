#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lsbec/hierarchical.hpp"
#include "lsbec/thermodynamics.hpp"

using namespace lsbec;

namespace {

using K = HierarchyKind;

double brute_critical(double lambda, double beta) {
    long double acc = 0.0L;
    for (int s = 1; s < 1000; ++s) acc += 1.0L / std::expm1(static_cast<long double>(beta * c_squared * lambda * lambda * s * s));
    return static_cast<double>(lambda * acc);
}

std::vector<OccupationProfile> ladder_profiles(K kind, std::uint64_t M, double rho_factor = 2.0) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    std::vector<OccupationProfile> out;
    for (double L : {1e4, 1e5, 1e6}) out.push_back(occupation_profile(build_layout(kind, L, 1.0, M), 1.0, rho_factor * rc));
    return out;
}

double large_ground(const OccupationProfile& p, std::uint64_t interval = 0) {
    for (const auto& e : p.entries)
        if (e.interval_class == IntervalClass::large && e.interval == interval && e.s == 1) return e.density;
    return NAN;
}

} // namespace

TEST(BuildLayout, DefiningLengths) {
    const auto a = build_layout(K::TypeI, std::exp(2.0), 1.0);
    EXPECT_NEAR(a.large_length, 2.0, 1e-14);
    EXPECT_EQ(a.interval_count, 7u);
    const auto b = build_layout(K::TypeI, 1e6, 1.0);
    EXPECT_NEAR(b.small_length, 1.0, 1e-4);
    EXPECT_NEAR(b.small_length, (1e6 - std::log(1e6)) / (1e6 - 1.0), 1e-15);
    const auto c = build_layout(K::TypeII, 1e4, 1.0);
    EXPECT_NEAR(c.large_length, 100.0, 1e-12);
    const auto d = build_layout(K::TypeIII, 1e5, 2.0);
    EXPECT_EQ(d.interval_count, 200000u);
    EXPECT_EQ(d.large_count, static_cast<std::uint64_t>(std::floor(std::log(200001.0))));
    EXPECT_NEAR(d.large_length, std::log(2e5) / 2.0, 1e-14);
    for (auto h : {a, b, c, d}) {
        const auto part = h.to_partition();
        EXPECT_NEAR(part.total_length(), h.total_length, 1e-9 * h.total_length);
        EXPECT_EQ(part.size(), h.interval_count);
    }
}

TEST(BuildLayout, RejectsTooSmallSystems) {
    EXPECT_THROW(build_layout(K::TypeI, 1.5, 1.0), std::invalid_argument);
    EXPECT_THROW(build_layout(K::TypeII, 1.9, 1.0), std::invalid_argument);
    EXPECT_THROW(build_layout(K::TypeI, 10.0, 1.0, 10), std::invalid_argument);
    EXPECT_THROW(build_layout(K::TypeI, 10.0, 1.0, 0), std::invalid_argument);
}

TEST(HierarchicalDensity, MatchesGenericFiniteDensity) {
    for (auto kind : {K::TypeI, K::TypeII, K::TypeIII}) {
        const auto h = build_layout(kind, 3000.0, 1.0, 2);
        const auto part = h.to_partition();
        for (double mu : {-0.5, 0.0, h.ground_energy() - 1e-4}) {
            const double a = hierarchical_density(h, 1.0, mu);
            const double b = density_finite(part, 1.0, mu);
            EXPECT_NEAR(a, b, 1e-12 * b) << to_string(kind) << " " << mu;
        }
    }
}

TEST(HierarchicalDensity, LargeSystemLimitAndMonotonicity) {
    // small intervals tend to length 1/lambda, so their levels tend to (c lambda s)^2
    for (auto [lam, beta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.05}}) {
        const auto h = build_layout(K::TypeI, 1e7, lam);
        auto series = [&](double scale) {
            long double ref = 0.0L;
            for (int s = 1; s < 5000; ++s)
                ref += 1.0L / std::expm1(static_cast<long double>(beta * (c_squared * scale * scale * s * s + 0.5)));
            return static_cast<double>(lam * ref);
        };
        const double v = hierarchical_density(h, beta, -0.5);
        EXPECT_NEAR(v / series(lam), 1.0, 1e-3) << lam;
        if (lam != 1.0) EXPECT_GT(std::abs(v / series(1.0 / lam) - 1.0), 0.5);
    }
    const auto h = build_layout(K::TypeII, 1e4, 1.0);
    double prev = 0.0;
    for (double mu = -2.0; mu < h.ground_energy(); mu += 0.05) {
        const double v = hierarchical_density(h, 1.0, mu);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_THROW(hierarchical_density(h, 1.0, h.ground_energy()), std::domain_error);
}

TEST(HierarchicalCriticalDensity, SeriesAndKindIndependence) {
    for (double lam : {0.5, 1.0, 2.0}) EXPECT_NEAR(hierarchical_critical_density(lam, 1.0), brute_critical(lam, 1.0), 1e-15);
    EXPECT_NEAR(hierarchical_critical_density(1.0, 1.0), 0.00724398389910787, 1e-16);
    EXPECT_LT(hierarchical_critical_density(1.0, 50.0), 1e-100);
    // the small intervals alone saturate at rho_c for every kind
    const double rc = hierarchical_critical_density(1.0, 1.0);
    for (auto kind : {K::TypeI, K::TypeII, K::TypeIII}) {
        const auto h = build_layout(kind, 1e8, 1.0, 3);
        auto none = [](std::uint64_t, double) {};
        const double d = c_squared / (h.small_length * h.small_length);
        const double small = detail::tower_sum(h.small_length, 1.0, d, none) * h.small_count() / h.total_length;
        EXPECT_NEAR(small / rc, 1.0, 1e-3) << to_string(kind);
    }
}

TEST(SolveMuHierarchical, RoundTrip) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    for (auto kind : {K::TypeI, K::TypeII, K::TypeIII})
        for (double rho : {0.5 * rc, 2.0 * rc, rc + 1.0}) {
            const auto h = build_layout(kind, 1e5, 1.0);
            const double mu = solve_mu_hierarchical(h, 1.0, rho);
            EXPECT_LT(mu, h.ground_energy());
            EXPECT_NEAR(hierarchical_density(h, 1.0, mu), rho, 1e-10 * rho) << to_string(kind);
        }
}

TEST(SolveMuHierarchical, TypeIGapScaling) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    const double rho = 2.0 * rc, rho0 = rho - rc;
    std::vector<double> dev;
    for (double L : {1e4, 1e5, 1e6}) {
        const auto h = build_layout(K::TypeI, L, 1.0);
        const double sg = scaled_gap(h, 1.0, rho);
        dev.push_back(std::abs(sg * rho0 - 1.0));
        // with the finite-L ground-state density in place of rho_0 the product is 1 up to O(gap)
        const auto prof = occupation_profile(h, 1.0, rho);
        EXPECT_NEAR(sg * large_ground(prof), 1.0, prof.gap) << L;
    }
    EXPECT_GT(dev[0], dev[1]);
    EXPECT_GT(dev[1], dev[2]);
    EXPECT_LT(dev[2], 0.05);
}

TEST(SolveMuHierarchical, TypeIIGapApproachesA) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    const double A = solve_type2_A(1.0, 1.0, 2.0 * rc);
    double prev = 0.0;
    for (double L : {1e4, 1e5, 1e6}) {
        const double sg = scaled_gap(build_layout(K::TypeII, L, 1.0), 1.0, 2.0 * rc);
        EXPECT_GT(sg, prev);
        EXPECT_LT(sg, A);
        prev = sg;
    }
}

TEST(ShiftedBasel, ClosedFormMatchesBruteForce) {
    for (double w : {-50.0, -1.0, -1e-4, 0.0, 2e-4, 0.3, 0.9, 0.999999}) {
        long double acc = 0.0L;
        const long N = 2000000;
        for (long s = N; s >= 1; --s) acc += 1.0L / (static_cast<long double>(s) * s - w);
        acc += 1.0L / (N + 0.5L);  // tail sum_{s>N} 1/s^2
        EXPECT_NEAR(detail::shifted_basel(w), static_cast<double>(acc), 1e-12 * static_cast<double>(acc)) << w;
    }
}

TEST(SolveType2A, RootMonotonicityAndSplit) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    double prev = INFINITY;
    for (double excess : {0.1, 1.0, 10.0}) {
        const double A = solve_type2_A(1.0, 1.0, rc + excess);
        EXPECT_LT(A, prev);
        prev = A;
        // residual of rho = sum_s 1/(beta lambda c^2 (s^2 - 1) + A) + rho_c by direct summation
        long double acc = 0.0L;
        for (long s = 4000000; s >= 1; --s) acc += 1.0L / (c_squared * (static_cast<long double>(s) * s - 1.0L) + A);
        acc += 1.0L / (c_squared * (4000000.5L));
        EXPECT_NEAR(static_cast<double>(acc) + rc, rc + excess, 1e-10 * (rc + excess)) << excess;
    }
    const double A1 = solve_type2_A(1.0, 1.0, rc + 1.0);
    EXPECT_LT(1.0 / A1, 1.0);
    EXPECT_THROW(solve_type2_A(1.0, 1.0, 0.5 * rc), std::domain_error);
}

TEST(OccupationProfile, SumsToDensity) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    for (auto kind : {K::TypeI, K::TypeII, K::TypeIII})
        for (double rho : {0.5 * rc, 2.0 * rc})
            for (double L : {1e4, 1e6}) {
                const auto p = occupation_profile(build_layout(kind, L, 1.0, 3), 1.0, rho);
                EXPECT_NEAR(p.total(), rho, 1e-8 * rho) << to_string(kind) << " " << L;
            }
}

TEST(OccupationProfile, TypeIGroundStatesCarryTheCondensate) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    const double rho0 = rc;  // rho = 2 rho_c
    double prev = 0.0;
    for (const auto& p : ladder_profiles(K::TypeI, 1)) {
        const double g = large_ground(p);
        EXPECT_GT(g, prev);
        EXPECT_LT(g, rho0);
        prev = g;
    }
    EXPECT_GT(prev / rho0, 0.95);
    // M = 3: equal shares, jointly approaching rho_0
    prev = 0.0;
    for (const auto& p : ladder_profiles(K::TypeI, 3)) {
        const double g0 = large_ground(p, 0);
        EXPECT_NEAR(large_ground(p, 1), g0, 1e-12 * g0);
        EXPECT_NEAR(large_ground(p, 2), g0, 1e-12 * g0);
        EXPECT_GT(3.0 * g0, prev);
        prev = 3.0 * g0;
    }
    EXPECT_GT(prev / rho0, 0.9);
}

TEST(OccupationProfile, TypeIIIStatesVanish) {
    const double rc = hierarchical_critical_density(1.0, 1.0);
    auto max_state = [](const OccupationProfile& p) {
        double m = 0.0;
        for (const auto& e : p.entries) m = std::max(m, e.density);
        return m;
    };
    for (double L : {1e4, 1e5, 1e6, 1e12}) {
        const auto h = build_layout(K::TypeIII, L, 1.0);
        const auto p = occupation_profile(h, 1.0, 2.0 * rc);
        EXPECT_LE(max_state(p), (p.rho - rc) / static_cast<double>(h.large_count)) << L;
        double large = 0.0;
        for (const auto& e : p.entries)
            if (e.interval_class == IntervalClass::large) large += e.density;
        EXPECT_GT(large, 0.5 * (p.rho - rc)) << L;
    }
    // the decay is logarithmic in L
    const auto small = occupation_profile(build_layout(K::TypeIII, 1e4, 1.0), 1.0, 2.0 * rc);
    const auto huge = occupation_profile(build_layout(K::TypeIII, 1e12, 1.0), 1.0, 2.0 * rc);
    EXPECT_LT(max_state(huge), 0.7 * max_state(small));
}

TEST(OccupationProfile, StateOccupationNonDecreasingInDensity) {
    const auto h = build_layout(K::TypeII, 1e5, 1.0);
    const double rc = hierarchical_critical_density(1.0, 1.0);
    std::vector<double> prev;
    for (double f : {0.3, 0.9, 1.5, 3.0}) {
        const auto p = occupation_profile(h, 1.0, f * rc);
        std::vector<double> cur;
        for (std::size_t i = 0; i < 10; ++i) cur.push_back(p.entries[i].density);
        if (!prev.empty())
            for (std::size_t i = 0; i < cur.size(); ++i) EXPECT_GE(cur[i], prev[i]);
        prev = cur;
    }
}

TEST(Classify, RecognizesTheThreeLayouts) {
    EXPECT_EQ(classify_condensate(ladder_profiles(K::TypeI, 1)).type, CondensateType::TypeI);
    EXPECT_EQ(classify_condensate(ladder_profiles(K::TypeI, 3)).type, CondensateType::TypeI);
    EXPECT_EQ(classify_condensate(ladder_profiles(K::TypeII, 1)).type, CondensateType::TypeII);
    EXPECT_EQ(classify_condensate(ladder_profiles(K::TypeIII, 1)).type, CondensateType::TypeIII);
}

TEST(Classify, NoCondensateBelowCriticalDensity) {
    EXPECT_EQ(classify_condensate(ladder_profiles(K::TypeI, 1, 0.5)).type, CondensateType::None);
}

TEST(Classify, InconsistentSignalIsIndeterminate) {
    auto make = [](double L, int intervals) {
        OccupationProfile p;
        p.total_length = L;
        p.rho = 2.0;
        p.rho_c = 1.0;
        for (int j = 0; j < intervals; ++j) p.entries.push_back({IntervalClass::large, std::uint64_t(j), 1, 0.9 / intervals, 1});
        p.entries.push_back({IntervalClass::small, 0, 1, 1e-6, 100});
        return p;
    };
    const auto c = classify_condensate({make(1e4, 1), make(1e5, 2), make(1e6, 1)});
    EXPECT_EQ(c.type, CondensateType::Indeterminate);
    EXPECT_FALSE(c.reason.empty());
    EXPECT_THROW(classify_condensate({make(1e4, 1), make(1e5, 1)}), std::invalid_argument);
    EXPECT_THROW(classify_condensate({make(1e5, 1), make(1e4, 1), make(1e6, 1)}), std::invalid_argument);
}
