#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "hawkesboot/bootstrap.hpp"
#include "hawkesboot/likelihood.hpp"
#include "hawkesboot/parallel.hpp"
#include "hawkesboot/simulate.hpp"
#include "hawkesboot/stats.hpp"

namespace hawkesboot {

struct ModelRow {
    std::string label;
    Params theta;
};

/// The nine exponential-kernel parameter rows of the simulation study,
/// all with unit stationary mean intensity.
inline std::vector<ModelRow> standard_models() {
    return {
        {"1A", Params(0.8, Kernel::exponential(0.2, 1.0))},
        {"1B", Params(0.8, Kernel::exponential(1.0, 5.0))},
        {"1C", Params(0.8, Kernel::exponential(5.0, 25.0))},
        {"2A", Params(0.5, Kernel::exponential(0.5, 1.0))},
        {"2B", Params(0.5, Kernel::exponential(2.5, 5.0))},
        {"2C", Params(0.5, Kernel::exponential(12.5, 25.0))},
        {"3A", Params(0.2, Kernel::exponential(0.8, 1.0))},
        {"3B", Params(0.2, Kernel::exponential(4.0, 5.0))},
        {"3C", Params(0.2, Kernel::exponential(20.0, 25.0))},
    };
}

inline ModelRow standard_model(const std::string& label) {
    for (auto& row : standard_models()) {
        if (row.label == label) {
            return row;
        }
    }
    throw std::invalid_argument("unknown model label '" + label + "' (expected 1A..3C)");
}

struct McConfig {
    std::vector<ModelRow> models = standard_models();
    std::vector<double> horizons{50.0, 100.0, 200.0};
    int reps = 500;           // valid-replication target (or attempt count, see fixed_attempts)
    int bootstrap_reps = 199; // B
    double burn_in = 500.0;
    double level = 0.95;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes{kPrfb, kNpfb, kPrrb, kNprb};
    /// When set, run exactly `reps` attempts and keep every sanity-passing one
    /// instead of attempting until `reps` valid replications are collected.
    bool fixed_attempts = false;
    int max_attempt_factor = 5;  // attempt cap = factor * reps
    int threads = 1;             // execution detail; does not affect results
};

/// One coverage/rejection rate with its Monte Carlo standard error.
struct McCell {
    std::string model;
    double horizon = 0.0;
    std::string method;  // "sc", "asym", or a bootstrap scheme name
    std::string target;  // "mu","alpha","beta","a","ce_theta","ce_theta_tilde","lr","fail_rate"
    double rate = 0.0;
    double mc_se = 0.0;
    int sample_size = 0;  // replications (or attempts for "sc") behind the rate
};

struct McRowStats {
    std::string model;
    double horizon = 0.0;
    int attempts = 0;        // attempts evaluated
    int valid = 0;           // sanity-passing attempts evaluated
    int used = 0;            // replications entering the rates
    int sc_failures = 0;
    int other_failures = 0;  // simulation/fit/bootstrap errors
    long bootstrap_discards = 0;  // across used replications and schemes
    double wall_seconds = 0.0;    // excluded from machine-readable exports
    bool feasible = true;
    std::string note;
};

struct McReport {
    // resolved configuration (threads intentionally omitted: runs must be
    // byte-identical for any worker count)
    std::vector<std::string> model_labels;
    std::vector<double> horizons;
    int reps = 0;
    int bootstrap_reps = 0;
    double burn_in = 0.0;
    double level = 0.0;
    std::uint64_t seed = 0;
    bool fixed_attempts = false;
    std::vector<std::string> scheme_names;

    std::vector<McCell> cells;
    std::vector<McRowStats> rows;
};

namespace detail {

constexpr std::array<const char*, 7> kMcTargets{"mu", "alpha", "beta", "a", "ce_theta", "ce_theta_tilde", "lr"};

struct AttemptOutcome {
    enum class Status { Valid, ScFail, Error };
    Status status = Status::Error;
    // flags[method][target]; method 0 is asymptotic, then the config schemes
    std::vector<std::array<bool, 7>> flags;
    long bootstrap_discards = 0;
};

inline AttemptOutcome evaluate_attempt(const McConfig& cfg, std::size_t model_idx, std::size_t horizon_idx,
                                       std::size_t attempt) {
    AttemptOutcome out;
    const ModelRow& row = cfg.models[model_idx];
    const double horizon = cfg.horizons[horizon_idx];
    try {
        const std::uint64_t sim_seed =
            derive_seed(cfg.seed, {model_idx, horizon_idx, attempt, 0});
        const EventSeries sim = simulate_thinning(row.theta, horizon, cfg.burn_in, sim_seed);
        if (sim.count() < 2) {
            out.status = AttemptOutcome::Status::ScFail;
            return out;
        }
        FitOptions fopt;
        fopt.family = ModelFamily::ExponentialHawkes;
        const FitResult fit = fit_mle(sim, fopt);
        if (!fit.converged || !fit.sanity.overall) {
            out.status = AttemptOutcome::Status::ScFail;
            return out;
        }

        const double z = normal_quantile(1.0 - 0.5 * (1.0 - cfg.level));
        const Params& truth = row.theta;
        const std::array<double, 4> truth_coords{truth.mu, truth.kernel.alpha(), truth.kernel.beta(),
                                                 branching_ratio(truth.kernel)};

        out.flags.assign(1 + cfg.schemes.size(), {});

        // Asymptotic intervals from the inverse negated Hessian: natural form
        // for (mu, alpha, beta), branching form for a.
        const Matrix cov_nat = spd_inverse(wald_weight(fit, Parameterization::Natural));
        const Matrix cov_br = spd_inverse(wald_weight(fit, Parameterization::BranchingRatio));
        const auto hat_nat = param_vector(fit.theta_hat, fit.family, Parameterization::Natural);
        const auto hat_br = param_vector(fit.theta_hat, fit.family, Parameterization::BranchingRatio);
        for (int c = 0; c < 3; ++c) {
            const double se = std::sqrt(cov_nat(c, c));
            out.flags[0][static_cast<std::size_t>(c)] =
                std::abs(hat_nat[static_cast<std::size_t>(c)] - truth_coords[static_cast<std::size_t>(c)]) <= z * se;
        }
        out.flags[0][3] = std::abs(hat_br[1] - truth_coords[3]) <= z * std::sqrt(cov_br(1, 1));
        out.flags[0][4] = asymptotic_ellipsoid_covers(fit, truth, cfg.level, Parameterization::Natural);
        out.flags[0][5] = asymptotic_ellipsoid_covers(fit, truth, cfg.level, Parameterization::BranchingRatio);
        const double lr_obs = lr_statistic(sim, truth, fit);
        out.flags[0][6] = lr_obs > chi2_quantile(cfg.level, param_dimension(fit.family));

        constexpr std::array<Coord, 4> coords{Coord::Mu, Coord::Alpha, Coord::Beta, Coord::BranchingRatio};
        for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
            BootstrapOptions bopt;
            bopt.scheme = cfg.schemes[s];
            bopt.replications = cfg.bootstrap_reps;
            bopt.seed = derive_seed(cfg.seed, {model_idx, horizon_idx, attempt, 1 + s});
            const BootstrapRun run = run_bootstrap(sim, fit, bopt);
            out.bootstrap_discards += run.discarded;
            auto& flags = out.flags[1 + s];
            for (std::size_t c = 0; c < coords.size(); ++c) {
                flags[c] = percentile_ci(run, coords[c], cfg.level).contains(truth_coords[c]);
            }
            flags[4] = confidence_ellipsoid_cover(run, fit, truth, cfg.level, Parameterization::Natural).bootstrap;
            flags[5] =
                confidence_ellipsoid_cover(run, fit, truth, cfg.level, Parameterization::BranchingRatio).bootstrap;
            flags[6] = bootstrap_lr_pvalue(run, lr_obs) <= 1.0 - cfg.level;
        }
        out.status = AttemptOutcome::Status::Valid;
    } catch (const std::exception&) {
        out.status = AttemptOutcome::Status::Error;
    }
    return out;
}

inline std::string format_rate(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

}  // namespace detail

/// The coverage experiment: per replication simulate, fit, apply the sanity
/// check, compute asymptotic and bootstrap confidence sets and LR tests, and
/// aggregate rates over the same valid replication set (paired design).
///
/// Deterministic for a given config, independent of the thread count: every
/// attempt draws from a stream derived from (seed, model, horizon, attempt).
inline McReport run_coverage_experiment(const McConfig& cfg) {
    if (cfg.reps <= 0) {
        throw std::invalid_argument("run_coverage_experiment: reps must be > 0");
    }
    if (cfg.bootstrap_reps < 19 && !cfg.schemes.empty()) {
        throw std::invalid_argument("run_coverage_experiment: need B >= 19");
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw std::invalid_argument("run_coverage_experiment: level must be in (0,1)");
    }
    if (cfg.models.empty() || cfg.horizons.empty()) {
        throw std::invalid_argument("run_coverage_experiment: empty model grid or horizon list");
    }
    for (const auto& m : cfg.models) {
        if (m.theta.kernel.family() != KernelFamily::Exponential) {
            throw std::invalid_argument("run_coverage_experiment: the harness covers exponential-kernel models");
        }
    }

    McReport report;
    for (const auto& m : cfg.models) report.model_labels.push_back(m.label);
    report.horizons = cfg.horizons;
    report.reps = cfg.reps;
    report.bootstrap_reps = cfg.bootstrap_reps;
    report.burn_in = cfg.burn_in;
    report.level = cfg.level;
    report.seed = cfg.seed;
    report.fixed_attempts = cfg.fixed_attempts;
    for (const auto& s : cfg.schemes) report.scheme_names.push_back(scheme_name(s));

    const std::size_t method_count = 1 + cfg.schemes.size();

    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        for (std::size_t ti = 0; ti < cfg.horizons.size(); ++ti) {
            const auto wall_start = std::chrono::steady_clock::now();
            McRowStats stats;
            stats.model = cfg.models[mi].label;
            stats.horizon = cfg.horizons[ti];

            if (!stationary(cfg.models[mi].theta)) {
                stats.feasible = false;
                stats.note = "non-stationary parameter row; simulation would explode over the burn-in window";
                report.rows.push_back(stats);
                continue;
            }

            const std::size_t cap = cfg.fixed_attempts
                                        ? static_cast<std::size_t>(cfg.reps)
                                        : static_cast<std::size_t>(cfg.reps) *
                                              static_cast<std::size_t>(std::max(1, cfg.max_attempt_factor));
            std::vector<detail::AttemptOutcome> outcomes;
            outcomes.reserve(cap);
            std::size_t valid_count = 0;
            // Waves keep the evaluated attempt set a deterministic function of
            // prior results only.
            while (outcomes.size() < cap) {
                std::size_t want = cfg.fixed_attempts
                                       ? cap - outcomes.size()
                                       : static_cast<std::size_t>(cfg.reps) - valid_count;
                if (want == 0) {
                    break;
                }
                if (!cfg.fixed_attempts && !outcomes.empty()) {
                    want += want / 8 + 2;  // headroom once a failure rate is visible
                }
                const std::size_t begin = outcomes.size();
                const std::size_t wave = std::min(want, cap - begin);
                outcomes.resize(begin + wave);
                parallel_for(wave, cfg.threads, [&](std::size_t k) {
                    outcomes[begin + k] = detail::evaluate_attempt(cfg, mi, ti, begin + k);
                });
                valid_count = 0;
                for (const auto& o : outcomes) {
                    if (o.status == detail::AttemptOutcome::Status::Valid) {
                        ++valid_count;
                    }
                }
                if (!cfg.fixed_attempts && valid_count >= static_cast<std::size_t>(cfg.reps)) {
                    break;
                }
            }

            stats.attempts = static_cast<int>(outcomes.size());
            for (const auto& o : outcomes) {
                switch (o.status) {
                    case detail::AttemptOutcome::Status::Valid: ++stats.valid; break;
                    case detail::AttemptOutcome::Status::ScFail: ++stats.sc_failures; break;
                    case detail::AttemptOutcome::Status::Error: ++stats.other_failures; break;
                }
            }

            const std::size_t target = cfg.fixed_attempts ? static_cast<std::size_t>(stats.valid)
                                                          : static_cast<std::size_t>(cfg.reps);
            std::vector<const detail::AttemptOutcome*> used;
            for (const auto& o : outcomes) {
                if (o.status == detail::AttemptOutcome::Status::Valid && used.size() < target) {
                    used.push_back(&o);
                }
            }
            stats.used = static_cast<int>(used.size());
            stats.feasible = !used.empty();
            if (!cfg.fixed_attempts && used.size() < static_cast<std::size_t>(cfg.reps)) {
                stats.note = "valid-replication target not reached within the attempt cap";
            }

            // sanity-check failure rate over evaluated attempts
            {
                McCell cell;
                cell.model = stats.model;
                cell.horizon = stats.horizon;
                cell.method = "sc";
                cell.target = "fail_rate";
                cell.sample_size = stats.attempts;
                const double p = stats.attempts > 0
                                     ? static_cast<double>(stats.sc_failures) / stats.attempts
                                     : 0.0;
                cell.rate = p;
                cell.mc_se = stats.attempts > 0 ? std::sqrt(p * (1.0 - p) / stats.attempts) : 0.0;
                report.cells.push_back(cell);
            }

            if (stats.feasible) {
                for (const auto* o : used) {
                    stats.bootstrap_discards += o->bootstrap_discards;
                }
                const double n = static_cast<double>(used.size());
                for (std::size_t method = 0; method < method_count; ++method) {
                    for (std::size_t t = 0; t < detail::kMcTargets.size(); ++t) {
                        double hits = 0.0;
                        for (const auto* o : used) {
                            hits += o->flags[method][t] ? 1.0 : 0.0;
                        }
                        McCell cell;
                        cell.model = stats.model;
                        cell.horizon = stats.horizon;
                        cell.method = method == 0 ? "asym" : scheme_name(cfg.schemes[method - 1]);
                        cell.target = detail::kMcTargets[t];
                        cell.rate = hits / n;
                        cell.mc_se = std::sqrt(cell.rate * (1.0 - cell.rate) / n);
                        cell.sample_size = static_cast<int>(used.size());
                        report.cells.push_back(cell);
                    }
                }
            } else {
                stats.note = "no valid replications";
            }

            stats.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
            report.rows.push_back(stats);
        }
    }
    return report;
}

inline void write_csv(const McReport& report, std::ostream& os) {
    os << "model,T,method,target,rate,mc_se,sample_size\n";
    char tbuf[32];
    for (const auto& c : report.cells) {
        std::snprintf(tbuf, sizeof(tbuf), "%g", c.horizon);
        os << c.model << ',' << tbuf << ',' << c.method << ',' << c.target << ','
           << detail::format_rate(c.rate) << ',' << detail::format_rate(c.mc_se) << ',' << c.sample_size << '\n';
    }
}

/// Aligned-text rendering in the layout of the published tables (methods as
/// rows, targets as columns), one block per (model, horizon).
inline void write_text(const McReport& report, std::ostream& os) {
    char buf[160];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "Model %s, T=%g  (attempts=%d, valid=%d, used=%d, sc_failures=%d, wall=%.1fs)",
                      row.model.c_str(), row.horizon, row.attempts, row.valid, row.used, row.sc_failures,
                      row.wall_seconds);
        os << buf << '\n';
        if (!row.feasible) {
            os << "  infeasible: " << row.note << "\n\n";
            continue;
        }
        std::snprintf(buf, sizeof(buf), "  %-6s %8s %8s %8s %8s %10s %10s %8s", "", "mu", "alpha", "beta", "a",
                      "ce", "ce~", "lr");
        os << buf << '\n';
        std::vector<std::string> methods{"asym"};
        for (const auto& s : report.scheme_names) methods.push_back(s);
        for (const auto& method : methods) {
            std::string line = "  ";
            char cellbuf[32];
            std::snprintf(cellbuf, sizeof(cellbuf), "%-6s", method.c_str());
            line += cellbuf;
            for (const auto* target : detail::kMcTargets) {
                double rate = 0.0;
                for (const auto& c : report.cells) {
                    if (c.model == row.model && c.horizon == row.horizon && c.method == method &&
                        c.target == target) {
                        rate = c.rate;
                        break;
                    }
                }
                const int width = std::string(target).starts_with("ce") ? 10 : 8;
                std::snprintf(cellbuf, sizeof(cellbuf), " %*.1f", width, 100.0 * rate);
                line += cellbuf;
            }
            os << line << '\n';
        }
        os << '\n';
    }
}

}  // namespace hawkesboot
