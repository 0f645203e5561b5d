#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkesboot/bootstrap.hpp"
#include "hawkesboot/diagnostics.hpp"
#include "hawkesboot/likelihood.hpp"
#include "hawkesboot/montecarlo.hpp"

namespace hawkesboot {

inline constexpr int kSchemaVersion = 1;

/// Bad input files, unparsable flags, unwritable outputs. The CLI maps this
/// to exit code 2; numeric failures exit with 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads event times from a plain file (one strictly increasing time per
/// line) or a CSV whose header names a `t` column. Violations are reported
/// with the offending line number.
inline std::vector<double> read_event_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open event file '" + path + "'");
    }
    std::vector<double> times;
    std::string line;
    int line_no = 0;
    int t_column = 0;
    bool csv = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && line.find_first_not_of("+-.0123456789eE \t,") != std::string::npos) {
            // header row; locate the time column
            csv = true;
            std::stringstream header(line);
            std::string name;
            int col = 0;
            t_column = -1;
            while (std::getline(header, name, ',')) {
                name.erase(0, name.find_first_not_of(" \t"));
                name.erase(name.find_last_not_of(" \t") + 1);
                if (name == "t") {
                    t_column = col;
                }
                ++col;
            }
            if (t_column < 0) {
                throw UsageError(path + ":1: CSV header has no 't' column");
            }
            continue;
        }
        std::string field = line;
        if (csv || line.find(',') != std::string::npos) {
            std::stringstream cells(line);
            int col = 0;
            field.clear();
            while (std::getline(cells, field, ',') && col < t_column) {
                ++col;
            }
        }
        try {
            std::size_t used = 0;
            const double t = std::stod(field, &used);
            while (used < field.size() && (field[used] == ' ' || field[used] == '\t')) ++used;
            if (used != field.size()) {
                throw std::invalid_argument("trailing characters");
            }
            times.push_back(t);
        } catch (const std::exception&) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": cannot parse event time '" + field + "'");
        }
        if (times.size() >= 2 && !(times.back() > times[times.size() - 2])) {
            throw UsageError(path + ":" + std::to_string(line_no) +
                                     ": event times must be strictly increasing (duplicate or unsorted time)");
        }
    }
    return times;
}

/// Writes one event time per line with 17 significant digits (lossless for
/// doubles).
inline void write_event_file(const std::string& path, std::span<const double> times) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write event file '" + path + "'");
    }
    char buf[40];
    for (double t : times) {
        std::snprintf(buf, sizeof(buf), "%.17g", t);
        out << buf << '\n';
    }
    if (!out) {
        throw UsageError("write failed for '" + path + "'");
    }
}

inline std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::Poisson: return "poisson";
        case ModelFamily::ExponentialHawkes: return "exp";
        case ModelFamily::PowerLawHawkes: return "powerlaw";
    }
    return "?";
}

inline ModelFamily family_from_name(const std::string& s) {
    if (s == "poisson") return ModelFamily::Poisson;
    if (s == "exp" || s == "exponential") return ModelFamily::ExponentialHawkes;
    if (s == "powerlaw" || s == "power-law") return ModelFamily::PowerLawHawkes;
    throw std::invalid_argument("unknown kernel family '" + s + "' (expected exp|powerlaw|poisson)");
}

inline nlohmann::json params_to_json(const Params& p, ModelFamily family) {
    nlohmann::json j;
    j["mu"] = p.mu;
    if (family != ModelFamily::Poisson) {
        j["alpha"] = p.kernel.alpha();
        j["beta"] = p.kernel.beta();
        const double a = branching_ratio(p.kernel);
        if (std::isfinite(a)) {
            j["a"] = a;
        }
        if (family == ModelFamily::PowerLawHawkes) {
            j["delta"] = p.kernel.delta();
        }
    }
    return j;
}

inline Params params_from_flag(const std::string& csv, ModelFamily family) {
    std::vector<double> v;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        v.push_back(std::stod(cell));
    }
    if (static_cast<int>(v.size()) != param_dimension(family)) {
        throw std::invalid_argument("expected " + std::to_string(param_dimension(family)) +
                                    " comma-separated values (natural form), got " + std::to_string(v.size()));
    }
    return params_from_vector(v, family, Parameterization::Natural);
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.size(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json fit_to_json(const FitResult& fit, const EventSeries& series, double level) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "fit";
    j["family"] = family_name(fit.family);
    j["n_events"] = series.count();
    j["n_pre_sample"] = series.pre_sample().size();
    j["horizon"] = series.horizon();
    j["theta_hat"] = params_to_json(fit.theta_hat, fit.family);
    j["loglik"] = fit.loglik;
    double score_norm = 0.0;
    for (double s : fit.score) score_norm = std::max(score_norm, std::abs(s));
    j["score"] = fit.score;
    j["score_norm"] = score_norm;
    j["hessian"] = matrix_to_json(fit.hessian);
    j["parameterization"] =
        reporting_parameterization(fit.family) == Parameterization::BranchingRatio ? "branching" : "natural";
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["sanity"] = {{"stationary", fit.sanity.stationary},
                   {"hessian_nd", fit.sanity.hessian_nd},
                   {"overall", fit.sanity.overall}};

    // asymptotic CIs from the inverse negated Hessian
    nlohmann::json cis;
    const double z = normal_quantile(1.0 - 0.5 * (1.0 - level));
    try {
        if (fit.family == ModelFamily::Poisson) {
            const Matrix cov = spd_inverse(detail::wald_weight(fit, Parameterization::Natural));
            const double se = std::sqrt(cov(0, 0));
            cis["mu"] = {fit.theta_hat.mu - z * se, fit.theta_hat.mu + z * se};
        } else {
            const Matrix cov_nat = spd_inverse(detail::wald_weight(fit, Parameterization::Natural));
            const auto nat = param_vector(fit.theta_hat, fit.family, Parameterization::Natural);
            const char* names[] = {"mu", "alpha", "beta", "delta"};
            for (std::size_t i = 0; i < nat.size(); ++i) {
                const double se = std::sqrt(cov_nat(static_cast<int>(i), static_cast<int>(i)));
                cis[names[i]] = {nat[i] - z * se, nat[i] + z * se};
            }
            if (fit.family == ModelFamily::ExponentialHawkes) {
                const Matrix cov_br = spd_inverse(detail::wald_weight(fit, Parameterization::BranchingRatio));
                const auto br = param_vector(fit.theta_hat, fit.family, Parameterization::BranchingRatio);
                const double se = std::sqrt(cov_br(1, 1));
                cis["a"] = {br[1] - z * se, br[1] + z * se};
            }
        }
        j["asymptotic_ci"] = cis;
        j["asymptotic_ci_level"] = level;
    } catch (const std::exception& e) {
        j["asymptotic_ci_error"] = e.what();
    }
    return j;
}

inline nlohmann::json bootstrap_run_to_json(const BootstrapRun& run, const FitResult& fit, double level) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "bootstrap";
    j["scheme"] = scheme_name(run.scheme);
    j["B"] = run.requested;
    j["seed"] = run.seed;
    j["restricted"] = run.restricted;
    if (run.center) {
        j["center"] = params_to_json(*run.center, fit.family);
    }
    j["retained"] = run.retained();
    j["discarded"] = run.discarded;
    j["reliable"] = run.reliable;
    j["level"] = level;

    nlohmann::json draws = nlohmann::json::array();
    for (std::size_t b = 0; b < run.theta_stars.size(); ++b) {
        nlohmann::json d = params_to_json(run.theta_stars[b], fit.family);
        d["lr"] = run.lr_stars[b];
        d["n"] = run.n_stars[b];
        draws.push_back(d);
    }
    j["draws"] = draws;

    if (run.retained() >= 2) {
        nlohmann::json cis;
        const auto cm = percentile_ci(run, Coord::Mu, level);
        cis["mu"] = {cm.lower, cm.upper};
        if (fit.family != ModelFamily::Poisson) {
            const auto ca = percentile_ci(run, Coord::Alpha, level);
            const auto cb = percentile_ci(run, Coord::Beta, level);
            const auto cr = percentile_ci(run, Coord::BranchingRatio, level);
            cis["alpha"] = {ca.lower, ca.upper};
            cis["beta"] = {cb.lower, cb.upper};
            cis["a"] = {cr.lower, cr.upper};
            if (fit.family == ModelFamily::PowerLawHawkes) {
                const auto cd = percentile_ci(run, Coord::Delta, level);
                cis["delta"] = {cd.lower, cd.upper};
            }
        }
        j["percentile_ci"] = cis;
    }
    return j;
}

inline nlohmann::json mc_report_to_json(const McReport& report) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "mc_report";
    j["config"] = {{"models", report.model_labels},
                   {"horizons", report.horizons},
                   {"reps", report.reps},
                   {"B", report.bootstrap_reps},
                   {"burn_in", report.burn_in},
                   {"level", report.level},
                   {"seed", report.seed},
                   {"fixed_attempts", report.fixed_attempts},
                   {"schemes", report.scheme_names}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        // wall time deliberately omitted: outputs must be run-invariant
        rows.push_back({{"model", r.model},
                        {"T", r.horizon},
                        {"attempts", r.attempts},
                        {"valid", r.valid},
                        {"used", r.used},
                        {"sc_failures", r.sc_failures},
                        {"other_failures", r.other_failures},
                        {"bootstrap_discards", r.bootstrap_discards},
                        {"feasible", r.feasible},
                        {"note", r.note}});
    }
    j["rows"] = rows;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"model", c.model},
                         {"T", c.horizon},
                         {"method", c.method},
                         {"target", c.target},
                         {"rate", c.rate},
                         {"mc_se", c.mc_se},
                         {"sample_size", c.sample_size}});
    }
    j["cells"] = cells;
    return j;
}

/// Key = value configuration file for the mc subcommand. Lines starting with
/// '#' are comments. Unknown keys are rejected.
inline McConfig parse_mc_config(std::istream& in, McConfig base = {}) {
    std::string line;
    int line_no = 0;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> items;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t"));
            cell.erase(cell.find_last_not_of(" \t") + 1);
            if (!cell.empty()) {
                items.push_back(cell);
            }
        }
        return items;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line.erase(0, line.find_first_not_of(" \t"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("mc config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        try {
            if (key == "models") {
                base.models.clear();
                if (value == "all") {
                    base.models = standard_models();
                } else {
                    for (const auto& label : split_list(value)) {
                        base.models.push_back(standard_model(label));
                    }
                }
            } else if (key == "horizons") {
                base.horizons.clear();
                for (const auto& t : split_list(value)) {
                    base.horizons.push_back(std::stod(t));
                }
            } else if (key == "schemes") {
                base.schemes.clear();
                for (const auto& s : split_list(value)) {
                    base.schemes.push_back(scheme_from_name(s));
                }
            } else if (key == "reps") {
                base.reps = std::stoi(value);
            } else if (key == "B") {
                base.bootstrap_reps = std::stoi(value);
            } else if (key == "burn_in") {
                base.burn_in = std::stod(value);
            } else if (key == "level") {
                base.level = std::stod(value);
            } else if (key == "seed") {
                base.seed = std::stoull(value);
            } else if (key == "fixed_attempts") {
                base.fixed_attempts = value == "true" || value == "1";
            } else if (key == "max_attempt_factor") {
                base.max_attempt_factor = std::stoi(value);
            } else {
                throw UsageError("unknown key '" + key + "'");
            }
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError("mc config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

}  // namespace hawkesboot
