// lsbec: command-line driver for disorder-averaged experiments.
//
//   lsbec ids --lambda 1 --box-length 5000 --seeds 100 --e-grid 0.5,1,2,5 --out ids.csv
//   lsbec correlate --rho-excess 0.5 --r-grid 0:50:1 --out corr.csv
//   lsbec hierarchy --kind TypeII --rho-factor 2 --l-ladder 1e4,1e5,1e6
//   lsbec --config run.json --seeds 20
//
// Exit codes: 0 success, 2 usage error, 3 numeric failure in an analytic
// value, 4 I/O error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsbec/experiment.hpp"
#include "lsbec/report.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> grid_from_json(const nlohmann::json& v, const std::string& field) {
    if (v.is_string()) return lsbec::parse_grid(v.get<std::string>(), field);
    if (!v.is_array()) throw lsbec::config_error(field, "expected an array or a grid string");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw lsbec::config_error(field, "grid entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

lsbec::HierarchyKind parse_kind(const std::string& s) {
    if (s == "TypeI" || s == "I") return lsbec::HierarchyKind::TypeI;
    if (s == "TypeII" || s == "II") return lsbec::HierarchyKind::TypeII;
    if (s == "TypeIII" || s == "III") return lsbec::HierarchyKind::TypeIII;
    throw lsbec::config_error("kind", "expected TypeI, TypeII or TypeIII, got '" + s + "'");
}

lsbec::OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return lsbec::OutputFormat::csv;
    if (s == "json") return lsbec::OutputFormat::json;
    throw lsbec::config_error("format", "expected csv or json, got '" + s + "'");
}

/// Declarative config file: keys mirror the long flags with '_' for '-'.
void apply_config_file(const std::string& path, lsbec::ExperimentConfig& c) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lsbec::config_error("config", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw lsbec::config_error("config", "top level must be an object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "command") {
                auto cmd = lsbec::parse_command(v.get<std::string>());
                if (!cmd) throw lsbec::config_error("command", "unknown command " + v.get<std::string>());
                c.command = *cmd;
            } else if (key == "lambda") c.lambda = v.get<double>();
            else if (key == "beta") c.beta = v.get<double>();
            else if (key == "mu") c.mu = v.get<double>();
            else if (key == "rho") c.rho = v.get<double>();
            else if (key == "rho_excess") c.rho_excess = v.get<double>();
            else if (key == "rho_factor") c.rho_factor = v.get<double>();
            else if (key == "box_length") c.box_length = v.get<double>();
            else if (key == "seeds") c.seeds = v.get<std::uint64_t>();
            else if (key == "base_seed") c.base_seed = v.get<std::uint64_t>();
            else if (key == "e_grid") c.e_grid = grid_from_json(v, key);
            else if (key == "r_grid") c.r_grid = grid_from_json(v, key);
            else if (key == "l_ladder") c.l_ladder = grid_from_json(v, key);
            else if (key == "k_grid") c.k_grid = grid_from_json(v, key);
            else if (key == "kind") c.kind = parse_kind(v.get<std::string>());
            else if (key == "large_count") c.large_count = v.get<std::uint64_t>();
            else if (key == "epsilon") c.epsilon = v.get<double>();
            else if (key == "amplitude") c.amplitude = v.get<double>();
            else if (key == "gamma") c.gamma = v.get<double>();
            else if (key == "threads") c.threads = v.get<unsigned>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "format") c.format = parse_format(v.get<std::string>());
            else throw lsbec::config_error(key, "unknown configuration key");
        } catch (const nlohmann::json::exception& e) {
            throw lsbec::config_error(key, std::string("wrong type: ") + e.what());
        }
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f << content;
    f.close();
    if (!f) throw io_error("failed writing " + path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disorder-averaged Bose gas experiments on Poisson interval partitions"};
    app.set_version_flag("--version", std::string(lsbec::version));

    std::string command, config_path, kind, format;
    double lambda = 1, beta = 1, mu = 0, rho = 0, rho_excess = 0, rho_factor = 0, box_length = 0;
    double epsilon = 0.01, amplitude = 1, gamma = 0.5;
    std::uint64_t seeds = 100, base_seed = 0, large_count = 1;
    unsigned threads = 0;
    std::string e_grid, r_grid, l_ladder, k_grid, out;

    app.add_option("command", command, "ids | thermo | correlate | hierarchy | orderstats | localize");
    app.add_option("--config", config_path, "JSON configuration file; flags override its values");
    app.add_option("--lambda", lambda, "impurity density");
    app.add_option("--beta", beta, "inverse temperature");
    auto* o_mu = app.add_option("--mu", mu, "chemical potential");
    auto* o_rho = app.add_option("--rho", rho, "particle density");
    auto* o_rex = app.add_option("--rho-excess", rho_excess, "density as rho_c + value");
    auto* o_rfac = app.add_option("--rho-factor", rho_factor, "density as value * rho_c");
    o_mu->excludes(o_rho)->excludes(o_rex)->excludes(o_rfac);
    o_rho->excludes(o_rex)->excludes(o_rfac);
    o_rex->excludes(o_rfac);
    app.add_option("--box-length", box_length, "system length L");
    app.add_option("--seeds", seeds, "number of disorder realizations (trials)");
    app.add_option("--base-seed", base_seed, "base seed; trial i uses stream (base_seed, i)");
    app.add_option("--e-grid", e_grid, "energies: a,b,c or start:stop:step");
    app.add_option("--r-grid", r_grid, "separations");
    app.add_option("--l-ladder", l_ladder, "system lengths");
    app.add_option("--k-grid", k_grid, "sample sizes for order statistics");
    app.add_option("--kind", kind, "hierarchical layout: TypeI | TypeII | TypeIII");
    app.add_option("--large-count", large_count, "number of large intervals (TypeI)");
    app.add_option("--epsilon", epsilon, "condensate energy window");
    app.add_option("--amplitude", amplitude, "spacing threshold amplitude a");
    app.add_option("--gamma", gamma, "spacing threshold exponent");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_option("--out", out, "result file (stdout when omitted)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    lsbec::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);
        auto given = [&](const char* flag) { return app.count(flag) > 0; };
        if (!command.empty()) {
            auto cmd = lsbec::parse_command(command);
            if (!cmd) throw lsbec::config_error("command", "unknown command '" + command + "'");
            cfg.command = *cmd;
        } else if (config_path.empty()) {
            throw lsbec::config_error("command", "missing command");
        }
        // A density flag replaces any density from the file.
        if (given("--mu") || given("--rho") || given("--rho-excess") || given("--rho-factor")) {
            cfg.mu.reset();
            cfg.rho.reset();
            cfg.rho_excess.reset();
            cfg.rho_factor.reset();
        }
        if (given("--lambda")) cfg.lambda = lambda;
        if (given("--beta")) cfg.beta = beta;
        if (given("--mu")) cfg.mu = mu;
        if (given("--rho")) cfg.rho = rho;
        if (given("--rho-excess")) cfg.rho_excess = rho_excess;
        if (given("--rho-factor")) cfg.rho_factor = rho_factor;
        if (given("--box-length")) cfg.box_length = box_length;
        if (given("--seeds")) cfg.seeds = seeds;
        if (given("--base-seed")) cfg.base_seed = base_seed;
        if (given("--e-grid")) cfg.e_grid = lsbec::parse_grid(e_grid, "e_grid");
        if (given("--r-grid")) cfg.r_grid = lsbec::parse_grid(r_grid, "r_grid");
        if (given("--l-ladder")) cfg.l_ladder = lsbec::parse_grid(l_ladder, "l_ladder");
        if (given("--k-grid")) cfg.k_grid = lsbec::parse_grid(k_grid, "k_grid");
        if (given("--kind")) cfg.kind = parse_kind(kind);
        if (given("--large-count")) cfg.large_count = large_count;
        if (given("--epsilon")) cfg.epsilon = epsilon;
        if (given("--amplitude")) cfg.amplitude = amplitude;
        if (given("--gamma")) cfg.gamma = gamma;
        if (given("--threads")) cfg.threads = threads;
        if (given("--out")) cfg.out = out;
        if (given("--format")) cfg.format = parse_format(format);
        lsbec::validate(cfg);
    } catch (const lsbec::config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io;
    }

    const auto t0 = std::chrono::steady_clock::now();
    lsbec::ResultTable table;
    try {
        table = lsbec::run_experiment(cfg);
    } catch (const lsbec::config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream body;
    if (cfg.format == lsbec::OutputFormat::csv)
        lsbec::write_csv(body, table);
    else
        lsbec::write_json(body, table);
    try {
        if (cfg.out.empty()) {
            std::cout << body.str();
        } else {
            write_file(cfg.out, body.str());
            write_file(cfg.out + ".meta.json",
                       lsbec::metadata(cfg, table, wall, utc_timestamp()).dump(2) + "\n");
        }
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io;
    }
    for (const auto& [k, v] : table.annotations) std::cerr << k << ": " << v << "\n";
    return 0;
}
