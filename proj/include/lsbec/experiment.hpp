#pragma once

// Disorder-averaging experiment driver behind the command-line tool: a
// validated configuration, trial-parallel Monte Carlo with per-trial failure
// isolation, and a uniform result table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsbec/core.hpp"
#include "lsbec/correlations.hpp"
#include "lsbec/hierarchical.hpp"
#include "lsbec/numerics.hpp"
#include "lsbec/order_localization.hpp"
#include "lsbec/poisson_geometry.hpp"
#include "lsbec/rng.hpp"
#include "lsbec/spectrum.hpp"
#include "lsbec/thermodynamics.hpp"

namespace lsbec {

enum class Command { ids, thermo, correlate, hierarchy, orderstats, localize };
enum class OutputFormat { csv, json };

inline std::optional<Command> parse_command(const std::string& s) {
    static const std::map<std::string, Command> names{{"ids", Command::ids},
                                                      {"thermo", Command::thermo},
                                                      {"correlate", Command::correlate},
                                                      {"hierarchy", Command::hierarchy},
                                                      {"orderstats", Command::orderstats},
                                                      {"localize", Command::localize}};
    auto it = names.find(s);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

inline const char* to_string(Command c) {
    switch (c) {
    case Command::ids: return "ids";
    case Command::thermo: return "thermo";
    case Command::correlate: return "correlate";
    case Command::hierarchy: return "hierarchy";
    case Command::orderstats: return "orderstats";
    case Command::localize: return "localize";
    }
    return "?";
}

/// Invalid configuration; `field` names the offending setting.
class config_error : public std::invalid_argument {
public:
    config_error(std::string field, const std::string& msg)
        : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    Command command = Command::ids;
    double lambda = 1.0;
    double beta = 1.0;
    // At most one density specification: mu, rho, rho_excess (rho_c + x) or rho_factor (x rho_c).
    std::optional<double> mu;
    std::optional<double> rho;
    std::optional<double> rho_excess;
    std::optional<double> rho_factor;
    std::optional<double> box_length;
    std::uint64_t seeds = 100;
    std::uint64_t base_seed = 0;
    std::vector<double> e_grid;
    std::vector<double> r_grid;
    std::vector<double> l_ladder;
    std::vector<double> k_grid;
    HierarchyKind kind = HierarchyKind::TypeI;
    std::uint64_t large_count = 1;
    double epsilon = 0.01;
    double amplitude = 1.0;
    double gamma = 0.5;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string out;
    OutputFormat format = OutputFormat::csv;

    unsigned workers() const { return threads == 0 ? default_workers() : threads; }
    bool has_density() const { return rho || rho_excess || rho_factor; }
};

/// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
inline std::vector<double> parse_grid(const std::string& text, const std::string& field) {
    std::vector<double> out;
    auto to_num = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw config_error(field, "cannot parse number '" + s + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string::npos) throw config_error(field, "range must be start:stop:step");
        const double start = to_num(text.substr(0, a));
        const double stop = to_num(text.substr(a + 1, b - a - 1));
        const double step = to_num(text.substr(b + 1));
        if (!(step > 0.0) || !(stop >= start)) throw config_error(field, "range needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (n > 10000000) throw config_error(field, "range too long");
        for (std::size_t i = 0; i < n; ++i) out.push_back(start + step * static_cast<double>(i));
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = text.find(',', pos);
        const auto piece = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!piece.empty()) out.push_back(to_num(piece));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

namespace detail {

inline void check_grid(const std::vector<double>& g, const std::string& field, bool positive) {
    if (g.empty()) throw config_error(field, "grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) throw config_error(field, "grid values must be finite");
        if (positive ? !(g[i] > 0.0) : !(g[i] >= 0.0))
            throw config_error(field, positive ? "grid values must be positive" : "grid values must be >= 0");
        if (i > 0 && !(g[i] > g[i - 1])) throw config_error(field, "grid must be strictly increasing");
    }
}

} // namespace detail

/// Throws config_error naming the first offending field.
inline void validate(const ExperimentConfig& c) {
    auto positive = [](double v, const char* f) {
        if (!(std::isfinite(v) && v > 0.0)) throw config_error(f, "must be positive");
    };
    positive(c.lambda, "lambda");
    positive(c.beta, "beta");
    if (c.seeds < 1) throw config_error("seeds", "trial count must be >= 1");
    const int density_specs = !!c.mu + !!c.rho + !!c.rho_excess + !!c.rho_factor;
    if (density_specs > 1) throw config_error("mu", "set exactly one of mu, rho, rho_excess, rho_factor");
    if (c.mu && !std::isfinite(*c.mu)) throw config_error("mu", "must be finite");
    if (c.rho) positive(*c.rho, "rho");
    if (c.rho_excess) positive(*c.rho_excess, "rho_excess");
    if (c.rho_factor) positive(*c.rho_factor, "rho_factor");
    if (c.box_length) positive(*c.box_length, "box_length");
    positive(c.epsilon, "epsilon");
    positive(c.amplitude, "amplitude");
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw config_error("gamma", "must lie in (0, 1)");

    auto need_ladder = [&] {
        if (c.l_ladder.empty() && !c.box_length) throw config_error("l_ladder", "set l_ladder or box_length");
        if (!c.l_ladder.empty()) detail::check_grid(c.l_ladder, "l_ladder", true);
    };
    switch (c.command) {
    case Command::ids:
        detail::check_grid(c.e_grid, "e_grid", true);
        if (!c.box_length) throw config_error("box_length", "required by ids");
        break;
    case Command::thermo:
        if (density_specs != 1) throw config_error("mu", "thermo needs mu or a density");
        need_ladder();
        break;
    case Command::correlate:
        if (density_specs != 1) throw config_error("mu", "correlate needs mu or a density");
        detail::check_grid(c.r_grid, "r_grid", false);
        break;
    case Command::hierarchy:
        if (!c.has_density()) throw config_error("rho", "hierarchy needs a density");
        detail::check_grid(c.l_ladder, "l_ladder", true);
        if (c.large_count < 1) throw config_error("large_count", "must be >= 1");
        break;
    case Command::orderstats:
        detail::check_grid(c.k_grid, "k_grid", true);
        for (double k : c.k_grid)
            if (k < 2.0 || k != std::floor(k)) throw config_error("k_grid", "sample sizes must be integers >= 2");
        break;
    case Command::localize:
        if (!c.has_density()) throw config_error("rho", "localize needs a density");
        need_ladder();
        break;
    }
}

struct ResultRow {
    std::vector<double> inputs;
    std::string quantity;
    double mc_mean = NAN;
    double mc_std = NAN;
    double analytic = NAN;
    double rel_dev = NAN;
    std::uint64_t n_ok = 0;
    std::uint64_t n_failed = 0;
};

struct ResultTable {
    std::vector<std::string> input_names;
    std::vector<ResultRow> rows;
    std::map<std::string, std::string> annotations;  // e.g. a classification
};

namespace detail {

/// Mean/std of the successful trials; failures counted, never averaged.
inline ResultRow summarize(std::vector<double> inputs, std::string quantity,
                           const std::vector<std::optional<double>>& trials, double analytic) {
    ResultRow r;
    r.inputs = std::move(inputs);
    r.quantity = std::move(quantity);
    std::vector<double> ok;
    for (const auto& t : trials) {
        if (t && std::isfinite(*t))
            ok.push_back(*t);
        else
            ++r.n_failed;
    }
    r.n_ok = ok.size();
    if (!ok.empty()) {
        const auto m = moments(ok);
        r.mc_mean = m.mean;
        r.mc_std = m.std;
    }
    r.analytic = analytic;
    if (std::isfinite(r.mc_mean) && std::isfinite(analytic) && analytic != 0.0)
        r.rel_dev = std::abs(r.mc_mean - analytic) / std::abs(analytic);
    return r;
}

/// A deterministic value reported in the Monte Carlo columns.
inline ResultRow exact_row(std::vector<double> inputs, std::string quantity, double value, double analytic) {
    return summarize(std::move(inputs), std::move(quantity), {value}, analytic);
}

/// Runs fn(i) for every trial, storing nullopt when a trial throws.
template <class Fn>
std::vector<std::optional<double>> run_trials(std::uint64_t n, unsigned workers, Fn&& fn) {
    std::vector<std::optional<double>> out(n);
    parallel_for(n, workers, [&](std::size_t i) {
        try {
            out[i] = fn(i);
        } catch (const std::exception&) {
            out[i] = std::nullopt;
        }
    });
    return out;
}

inline double resolve_rho(const ExperimentConfig& c, double rho_c) {
    if (c.rho) return *c.rho;
    if (c.rho_excess) return rho_c + *c.rho_excess;
    if (c.rho_factor) return *c.rho_factor * rho_c;
    throw config_error("rho", "no density given");
}

inline std::vector<double> ladder(const ExperimentConfig& c) {
    return c.l_ladder.empty() ? std::vector<double>{*c.box_length} : c.l_ladder;
}

inline IntervalPartition trial_partition(const ExperimentConfig& c, double L, std::size_t i) {
    auto gen = make_stream(c.base_seed, i);
    return sample_poisson_partition(L, c.lambda, gen);
}

inline ResultTable run_ids(const ExperimentConfig& c) {
    const ModelParams p{c.lambda};
    const double L = *c.box_length;
    ResultTable t;
    t.input_names = {"lambda", "box_length", "E"};
    std::vector<std::vector<std::optional<double>>> per_e(c.e_grid.size(),
                                                          std::vector<std::optional<double>>(c.seeds));
    parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
        std::optional<IntervalPartition> part;
        try {
            part.emplace(trial_partition(c, L, i));
        } catch (const std::exception&) {
            return;
        }
        for (std::size_t e = 0; e < c.e_grid.size(); ++e) {
            try {
                per_e[e][i] = counting_function(*part, c.e_grid[e]);
            } catch (const std::exception&) {
            }
        }
    });
    for (std::size_t e = 0; e < c.e_grid.size(); ++e)
        t.rows.push_back(summarize({c.lambda, L, c.e_grid[e]}, "ids", per_e[e], ids_limit(p, c.e_grid[e])));
    return t;
}

inline ResultTable run_thermo(const ExperimentConfig& c) {
    const ModelParams p{c.lambda};
    ResultTable t;
    t.input_names = {"lambda", "beta", "box_length", "mu", "rho"};
    if (c.mu) {
        const double mu = *c.mu;
        const double rho_lim = mu < 0.0 ? density_limit(p, c.beta, mu) : NAN;
        const double p_lim = mu < 0.0 ? pressure_limit(p, c.beta, mu) : NAN;
        for (double L : ladder(c)) {
            std::vector<std::optional<double>> dens(c.seeds), pres(c.seeds);
            parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
                try {
                    const auto part = trial_partition(c, L, i);
                    dens[i] = density_finite(part, c.beta, mu);
                    pres[i] = pressure_finite(part, c.beta, mu);
                } catch (const std::exception&) {
                }
            });
            t.rows.push_back(summarize({c.lambda, c.beta, L, mu, NAN}, "density", dens, rho_lim));
            t.rows.push_back(summarize({c.lambda, c.beta, L, mu, NAN}, "pressure", pres, p_lim));
        }
        return t;
    }
    const double rho = resolve_rho(c, critical_density(p, c.beta));
    const auto cond = condensate_density(p, c.beta, rho);
    for (double L : ladder(c)) {
        std::vector<std::optional<double>> mus(c.seeds), conds(c.seeds);
        parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
            try {
                const auto part = trial_partition(c, L, i);
                const double mu = solve_mu_finite(part, c.beta, rho);
                mus[i] = mu;
                conds[i] = occupation_below(part, c.beta, mu, c.epsilon);
            } catch (const std::exception&) {
            }
        });
        t.rows.push_back(summarize({c.lambda, c.beta, L, NAN, rho}, "mu", mus, cond.mu_limit));
        t.rows.push_back(summarize({c.lambda, c.beta, L, NAN, rho}, "condensate", conds, cond.rho_0));
    }
    t.rows.push_back(exact_row({c.lambda, c.beta, NAN, NAN, rho}, "critical_density", cond.rho_c, cond.rho_c));
    return t;
}

inline ResultTable run_correlate(const ExperimentConfig& c) {
    const ModelParams p{c.lambda};
    ResultTable t;
    t.input_names = {"lambda", "beta", "box_length", "mu", "rho", "r"};
    const double L = c.box_length.value_or(NAN);
    std::optional<double> rho;
    double rho_c = NAN;
    if (!c.mu) {
        rho_c = critical_density(p, c.beta);
        rho = resolve_rho(c, rho_c);
    }
    const double mu_in = c.mu.value_or(NAN);
    const double rho_in = rho.value_or(NAN);

    // One partition and chemical potential per trial, shared by every r.
    std::vector<std::vector<std::optional<double>>> per_r(c.r_grid.size(),
                                                          std::vector<std::optional<double>>(c.box_length ? c.seeds : 0));
    if (c.box_length) {
        parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
            try {
                const auto part = trial_partition(c, L, i);
                const double mu = c.mu ? *c.mu : solve_mu_finite(part, c.beta, *rho);
                for (std::size_t k = 0; k < c.r_grid.size(); ++k) {
                    try {
                        per_r[k][i] = kernel_finite(part, c.beta, mu, c.r_grid[k]);
                    } catch (const std::exception&) {
                    }
                }
            } catch (const std::exception&) {
            }
        });
    }
    for (std::size_t k = 0; k < c.r_grid.size(); ++k) {
        const double r = c.r_grid[k];
        double analytic = NAN;
        if (c.mu) {
            if (*c.mu < 0.0) analytic = kernel_limit(p, c.beta, *c.mu, r);
        } else {
            analytic = kernel_with_condensate(p, c.beta, *rho, r, rho_c);
        }
        t.rows.push_back(summarize({c.lambda, c.beta, L, mu_in, rho_in, r}, "kernel", per_r[k], analytic));
    }
    if (rho) {
        const double plateau = odlro(p, c.beta, *rho, rho_c);
        t.rows.push_back(exact_row({c.lambda, c.beta, NAN, NAN, rho_in, INFINITY}, "odlro", plateau, plateau));
    }
    return t;
}

inline ResultTable run_hierarchy(const ExperimentConfig& c) {
    ResultTable t;
    t.input_names = {"lambda", "beta", "box_length", "rho", "large_count"};
    const double rho_c = hierarchical_critical_density(c.lambda, c.beta);
    const double rho = resolve_rho(c, rho_c);
    const double rho0 = rho - rho_c;
    const std::optional<double> A =
        c.kind == HierarchyKind::TypeII && rho0 > 0.0 ? std::optional<double>(solve_type2_A(c.lambda, c.beta, rho, rho_c))
                                                      : std::nullopt;
    std::vector<OccupationProfile> profiles;
    for (double L : c.l_ladder) {
        const auto h = build_layout(c.kind, L, c.lambda, c.large_count);
        auto prof = occupation_profile(h, c.beta, rho);
        const double M = static_cast<double>(h.large_count);
        const std::vector<double> in{c.lambda, c.beta, L, rho, M};
        double asym_gap = NAN, share = NAN;
        if (rho0 > 0.0) {
            asym_gap = A ? *A : M / rho0;
            share = A ? 1.0 / (*A) : rho0 / M;
        }
        const double scaled = c.beta * prof.gap * L;
        t.rows.push_back(exact_row(in, "mu", prof.mu_used, rho0 > 0.0 ? h.ground_energy() - asym_gap / (c.beta * L) : NAN));
        t.rows.push_back(exact_row(in, "scaled_gap", scaled, asym_gap));
        t.rows.push_back(exact_row(in, "ground_state_density", prof.entries.front().density, share));
        double large = 0.0;
        for (const auto& e : prof.entries)
            if (e.interval_class == IntervalClass::large) large += e.density;
        t.rows.push_back(exact_row(in, "large_interval_density", large, rho0 > 0.0 ? rho0 : 0.0));
        profiles.push_back(std::move(prof));
    }
    t.rows.push_back(exact_row({c.lambda, c.beta, NAN, rho, NAN}, "critical_density", rho_c, rho_c));
    if (A) t.rows.push_back(exact_row({c.lambda, c.beta, NAN, rho, NAN}, "type2_A", *A, *A));
    if (profiles.size() >= 3) {
        const auto cls = classify_condensate(profiles);
        t.annotations["classification"] = to_string(cls.type);
        t.annotations["classification_reason"] = cls.reason;
    }
    return t;
}

inline ResultTable run_orderstats(const ExperimentConfig& c) {
    ResultTable t;
    t.input_names = {"lambda", "k", "amplitude", "gamma"};
    for (double kd : c.k_grid) {
        const auto k = static_cast<std::size_t>(kd);
        std::vector<std::optional<double>> first(c.seeds), second(c.seeds), gap(c.seeds), hit(c.seeds);
        const SpacingQuery q(k, c.amplitude, c.gamma, c.lambda, c.seeds, c.base_seed);
        const double t_spacing = q.threshold();
        parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
            auto gen = make_stream(c.base_seed, i);
            const auto [l1, l2] = sample_top_two(c.lambda, k, gen);
            first[i] = l1;
            second[i] = l2;
            gap[i] = l1 - l2;
            hit[i] = dirichlet_eigenvalue(l2, 1) - dirichlet_eigenvalue(l1, 1) > t_spacing ? 1.0 : 0.0;
        });
        const std::vector<double> in{c.lambda, kd, c.amplitude, c.gamma};
        t.rows.push_back(summarize(in, "largest", first, expected_largest(c.lambda, k)));
        t.rows.push_back(summarize(in, "second_largest", second, expected_second_largest(c.lambda, k)));
        // mc_std of the gap is the sample standard deviation; compare its square.
        auto g = summarize(in, "gap_variance", gap, gap_variance(c.lambda));
        g.mc_mean = g.mc_std * g.mc_std;
        g.mc_std = NAN;
        g.rel_dev = std::abs(g.mc_mean - g.analytic) / g.analytic;
        t.rows.push_back(g);
        t.rows.push_back(summarize(in, "spacing_probability", hit, spacing_probability_exact(q)));
    }
    return t;
}

inline ResultTable run_localize(const ExperimentConfig& c) {
    const ModelParams p{c.lambda};
    ResultTable t;
    t.input_names = {"lambda", "beta", "box_length", "rho", "epsilon"};
    const double rho_c = critical_density(p, c.beta);
    const double rho = resolve_rho(c, rho_c);
    if (!(rho > rho_c)) throw config_error("rho", "localize needs rho above the critical density");
    for (double L : ladder(c)) {
        std::vector<std::optional<OccupationFraction>> res(c.seeds);
        parallel_for(c.seeds, c.workers(), [&](std::size_t i) {
            try {
                res[i] = occupation_fraction(trial_partition(c, L, i), c.beta, rho, c.epsilon);
            } catch (const std::exception&) {
            }
        });
        std::vector<std::optional<double>> frac, mus, empty, ties;
        std::vector<double> defined;
        for (const auto& r : res) {
            frac.push_back(r ? r->fraction : std::nullopt);
            if (r && r->fraction) defined.push_back(*r->fraction);
            mus.push_back(r ? std::optional<double>(r->mu) : std::nullopt);
            empty.push_back(r ? std::optional<double>(r->empty_window ? 1.0 : 0.0) : std::nullopt);
            ties.push_back(r ? std::optional<double>(r->tie ? 1.0 : 0.0) : std::nullopt);
        }
        const std::vector<double> in{c.lambda, c.beta, L, rho, c.epsilon};
        t.rows.push_back(summarize(in, "occupation_fraction", frac, 1.0));
        auto med = summarize(in, "occupation_fraction_median", frac, 1.0);
        med.mc_mean = defined.empty() ? NAN : median(defined);
        med.mc_std = NAN;
        med.rel_dev = std::isfinite(med.mc_mean) ? std::abs(med.mc_mean - 1.0) : NAN;
        t.rows.push_back(med);
        t.rows.push_back(summarize(in, "empty_window", empty, NAN));
        t.rows.push_back(summarize(in, "tie", ties, 0.0));
        t.rows.push_back(summarize(in, "mu", mus, 0.0));
    }
    return t;
}

} // namespace detail

/// Validates and runs the configured experiment. Exceptions from the
/// analytic path propagate; per-trial failures are counted in n_failed.
inline ResultTable run_experiment(const ExperimentConfig& c) {
    validate(c);
    switch (c.command) {
    case Command::ids: return detail::run_ids(c);
    case Command::thermo: return detail::run_thermo(c);
    case Command::correlate: return detail::run_correlate(c);
    case Command::hierarchy: return detail::run_hierarchy(c);
    case Command::orderstats: return detail::run_orderstats(c);
    case Command::localize: return detail::run_localize(c);
    }
    throw config_error("command", "unknown command");
}

} // namespace lsbec
