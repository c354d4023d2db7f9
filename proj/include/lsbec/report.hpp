#pragma once

// Result-table serialization: canonical CSV (17 significant digits), a JSON
// mirror, and the metadata sidecar.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "lsbec/core.hpp"
#include "lsbec/experiment.hpp"

namespace lsbec {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols{"quantity", "mc_mean", "mc_std", "analytic",
                                               "rel_dev",  "n_ok",    "n_failed"};
    return cols;
}

inline void write_csv(std::ostream& os, const ResultTable& t) {
    bool first = true;
    for (const auto& name : t.input_names) {
        os << (first ? "" : ",") << name;
        first = false;
    }
    for (const auto& name : result_columns()) os << ',' << name;
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.inputs.size(); ++i) os << (i ? "," : "") << format_number(r.inputs[i]);
        os << ',' << r.quantity << ',' << format_number(r.mc_mean) << ',' << format_number(r.mc_std) << ','
           << format_number(r.analytic) << ',' << format_number(r.rel_dev) << ',' << r.n_ok << ',' << r.n_failed
           << '\n';
    }
}

namespace detail {

// JSON has no NaN/inf; non-finite values become their CSV spelling.
inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

} // namespace detail

inline nlohmann::ordered_json table_to_json(const ResultTable& t) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json row;
        for (std::size_t i = 0; i < r.inputs.size(); ++i) row[t.input_names[i]] = detail::json_number(r.inputs[i]);
        row["quantity"] = r.quantity;
        row["mc_mean"] = detail::json_number(r.mc_mean);
        row["mc_std"] = detail::json_number(r.mc_std);
        row["analytic"] = detail::json_number(r.analytic);
        row["rel_dev"] = detail::json_number(r.rel_dev);
        row["n_ok"] = r.n_ok;
        row["n_failed"] = r.n_failed;
        rows.push_back(std::move(row));
    }
    nlohmann::ordered_json out;
    out["columns"] = t.input_names;
    for (const auto& c : result_columns()) out["columns"].push_back(c);
    out["rows"] = std::move(rows);
    if (!t.annotations.empty()) out["annotations"] = t.annotations;
    return out;
}

inline void write_json(std::ostream& os, const ResultTable& t) { os << table_to_json(t).dump(2) << '\n'; }

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    j["command"] = to_string(c.command);
    j["lambda"] = c.lambda;
    j["beta"] = c.beta;
    j["mu"] = opt(c.mu);
    j["rho"] = opt(c.rho);
    j["rho_excess"] = opt(c.rho_excess);
    j["rho_factor"] = opt(c.rho_factor);
    j["box_length"] = opt(c.box_length);
    j["seeds"] = c.seeds;
    j["base_seed"] = c.base_seed;
    j["e_grid"] = c.e_grid;
    j["r_grid"] = c.r_grid;
    j["l_ladder"] = c.l_ladder;
    j["k_grid"] = c.k_grid;
    j["kind"] = to_string(c.kind);
    j["large_count"] = c.large_count;
    j["epsilon"] = c.epsilon;
    j["amplitude"] = c.amplitude;
    j["gamma"] = c.gamma;
    j["threads"] = c.threads;
    j["out"] = c.out;
    j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
    return j;
}

/// Sidecar record: configuration, seed, library version, wall time.
inline nlohmann::ordered_json metadata(const ExperimentConfig& c, const ResultTable& t, double wall_seconds,
                                       const std::string& timestamp) {
    nlohmann::ordered_json m;
    m["config"] = config_to_json(c);
    m["base_seed"] = c.base_seed;
    m["version"] = version;
    m["wall_time_seconds"] = wall_seconds;
    m["timestamp"] = timestamp;
    m["rows"] = t.rows.size();
    if (!t.annotations.empty()) m["annotations"] = t.annotations;
    return m;
}

} // namespace lsbec
