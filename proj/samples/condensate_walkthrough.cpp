// Walk through the main quantities for one parameter point: the critical
// density, a disorder realization at twice that density, the condensate
// plateau of the correlation kernel, and the hierarchical analogue.

#include <cstdio>

#include "lsbec/correlations.hpp"
#include "lsbec/hierarchical.hpp"
#include "lsbec/poisson_geometry.hpp"
#include "lsbec/thermodynamics.hpp"

int main() {
    const lsbec::ModelParams p{1.0};
    const double beta = 1.0;

    const double rho_c = lsbec::critical_density(p, beta);
    const double rho = 2.0 * rho_c;
    std::printf("critical density          %.12g\n", rho_c);

    const auto part = lsbec::sample_poisson_partition(2000.0, lsbec::PoissonParams(p.lambda, 42));
    const double mu_L = lsbec::solve_mu_finite(part, beta, rho);
    std::printf("intervals in L = 2000     %zu (largest %.3f)\n", part.size(), part.largest());
    std::printf("mu_L at rho = 2 rho_c     %.6g (spectral bottom %.6g)\n", mu_L, lsbec::spectral_bottom(part));

    for (double r : {0.0, 1.0, 5.0, 20.0, 50.0})
        std::printf("kernel(r = %4.1f)          %.8g\n", r, lsbec::kernel_with_condensate(p, beta, rho, r, rho_c));
    std::printf("ODLRO plateau             %.8g\n", lsbec::odlro(p, beta, rho, rho_c));

    const double hier_rc = lsbec::hierarchical_critical_density(p.lambda, beta);
    std::vector<lsbec::OccupationProfile> profiles;
    for (double L : {1e4, 1e5, 1e6}) {
        const auto h = lsbec::build_layout(lsbec::HierarchyKind::TypeIII, L, p.lambda);
        profiles.push_back(lsbec::occupation_profile(h, beta, 2.0 * hier_rc));
    }
    const auto cls = lsbec::classify_condensate(profiles);
    std::printf("hierarchical TypeIII      %s (%s)\n", lsbec::to_string(cls.type), cls.reason.c_str());
}
