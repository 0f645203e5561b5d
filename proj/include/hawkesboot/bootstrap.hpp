#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/likelihood.hpp"
#include "hawkesboot/parallel.hpp"
#include "hawkesboot/rng.hpp"
#include "hawkesboot/stats.hpp"
#include "hawkesboot/timechange.hpp"

namespace hawkesboot {

/// How bootstrap event times are mapped back to the original time scale:
/// through the data-fixed compensator (FIB) or the path's own recursively
/// built compensator (RIB).
enum class IntensityMode { Fixed, Recursive };

/// How transformed waiting times are drawn: i.i.d. unit exponentials
/// (parametric) or resampling of the rescaled estimated residuals
/// (non-parametric).
enum class WaitMode { Parametric, NonParametric };

struct Scheme {
    IntensityMode intensity_mode = IntensityMode::Fixed;
    WaitMode wait_mode = WaitMode::Parametric;
};

inline constexpr Scheme kPrfb{IntensityMode::Fixed, WaitMode::Parametric};
inline constexpr Scheme kNpfb{IntensityMode::Fixed, WaitMode::NonParametric};
inline constexpr Scheme kPrrb{IntensityMode::Recursive, WaitMode::Parametric};
inline constexpr Scheme kNprb{IntensityMode::Recursive, WaitMode::NonParametric};

inline std::string scheme_name(Scheme s) {
    if (s.intensity_mode == IntensityMode::Fixed) {
        return s.wait_mode == WaitMode::Parametric ? "prfb" : "npfb";
    }
    return s.wait_mode == WaitMode::Parametric ? "prrb" : "nprb";
}

inline Scheme scheme_from_name(const std::string& name) {
    if (name == "prfb") return kPrfb;
    if (name == "npfb") return kNpfb;
    if (name == "prrb") return kPrrb;
    if (name == "nprb") return kNprb;
    throw std::invalid_argument("unknown bootstrap scheme '" + name + "' (expected prfb|npfb|prrb|nprb)");
}

/// Source of bootstrap transformed waiting times v*_i.
///
/// Parametric draws are unit exponentials. Non-parametric draws resample the
/// rescaled residuals v_i / vbar, whose sample space has mean exactly one.
class WaitSampler {
public:
    WaitSampler(WaitMode mode, const TransformedWaits& fit_waits) : mode_(mode) {
        if (mode_ == WaitMode::NonParametric) {
            if (fit_waits.values.empty()) {
                throw std::invalid_argument("WaitSampler: no residuals to resample from");
            }
            const double vbar = mean(fit_waits.values);
            if (!(vbar > 0.0)) {
                throw std::invalid_argument("WaitSampler: residuals must be strictly positive");
            }
            pool_.reserve(fit_waits.values.size());
            for (double v : fit_waits.values) {
                if (!(v > 0.0)) {
                    throw std::invalid_argument("WaitSampler: residuals must be strictly positive");
                }
                pool_.push_back(v / vbar);
            }
        }
    }

    double next(Rng& rng) const {
        if (mode_ == WaitMode::Parametric) {
            return rng.exp1();
        }
        return pool_[rng.below(pool_.size())];
    }

    [[nodiscard]] WaitMode mode() const { return mode_; }
    [[nodiscard]] std::span<const double> pool() const { return pool_; }

private:
    WaitMode mode_;
    std::vector<double> pool_;
};

/// Finite stream of bootstrap transformed waits (testing/inspection surface;
/// generation inside the bootstrap pulls straight from the sampler).
inline std::vector<double> draw_transformed_waits(Scheme scheme, const TransformedWaits& fit_waits,
                                                  std::size_t count, Rng& rng) {
    const WaitSampler sampler(scheme.wait_mode, fit_waits);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(sampler.next(rng));
    }
    return out;
}

namespace detail {

// One bootstrap event path. Fixed mode inverts the precomputed data
// compensator; recursive mode grows its own. The pre-sample history stays
// fixed to the original event times in both modes.
inline std::optional<EventSeries> generate_path(Scheme scheme, const Params& center, const EventSeries& original,
                                                const WaitSampler& sampler, const CompensatorTable* table, Rng& rng) {
    std::vector<double> events;
    if (scheme.intensity_mode == IntensityMode::Fixed) {
        double s = 0.0;
        while (true) {
            s += sampler.next(rng);
            const auto t = table->invert(s);
            if (!t) {
                break;
            }
            if (!events.empty() && !(*t > events.back())) {
                return std::nullopt;  // degenerate tie from an extremely small wait
            }
            events.push_back(*t);
        }
    } else {
        RecursivePath path(center, original.pre_sample(), 0.0, original.horizon());
        while (path.advance(sampler.next(rng))) {
        }
        const auto gen = path.generated();
        events.assign(gen.begin(), gen.end());
    }
    std::vector<double> pre(original.pre_sample().begin(), original.pre_sample().end());
    return EventSeries(std::move(pre), std::move(events), original.horizon());
}

}  // namespace detail

/// One bootstrap series for the given scheme and bootstrap-true value.
inline EventSeries generate_bootstrap_series(Scheme scheme, const Params& center, const EventSeries& original,
                                             Rng& rng) {
    const WaitSampler sampler(scheme.wait_mode, scheme.wait_mode == WaitMode::NonParametric
                                                    ? transformed_waiting_times(center, original)
                                                    : TransformedWaits{{}, center});
    std::optional<CompensatorTable> table;
    if (scheme.intensity_mode == IntensityMode::Fixed) {
        table.emplace(center, original);
    }
    auto path = detail::generate_path(scheme, center, original, sampler, table ? &*table : nullptr, rng);
    if (!path) {
        throw std::runtime_error("generate_bootstrap_series: degenerate bootstrap path");
    }
    return std::move(*path);
}

/// Results of B bootstrap replications under one scheme.
struct BootstrapRun {
    Scheme scheme;
    int requested = 0;                  // B
    std::uint64_t seed = 0;
    bool restricted = false;            // center at a hypothesized value?
    std::optional<Params> center;       // bootstrap-true value theta*
    std::vector<Params> theta_stars;    // retained bootstrap MLEs, in draw order
    std::vector<double> lr_stars;       // bootstrap LR statistics
    std::vector<int> n_stars;           // bootstrap event counts
    int discarded = 0;                  // failed generations or fits
    bool reliable = true;               // false when discards exceed 20% of B

    [[nodiscard]] int retained() const { return static_cast<int>(theta_stars.size()); }
};

struct BootstrapOptions {
    Scheme scheme;
    int replications = 199;  // B
    std::uint64_t seed = 0;
    /// Bootstrap-true value theta*. Defaults to the unrestricted MLE; set to
    /// the null value for a restricted bootstrap.
    std::optional<Params> center;
    int threads = 1;
    double max_discard_fraction = 0.2;
};

/// Runs the full bootstrap: generate B series, refit each with the
/// scheme-appropriate likelihood, and collect parameter draws, LR statistics
/// and event counts. Draws are independent given per-replication derived
/// streams, so results are identical for any thread count.
inline BootstrapRun run_bootstrap(const EventSeries& h, const FitResult& fit, const BootstrapOptions& opt) {
    if (opt.replications < 0) {
        throw std::invalid_argument("run_bootstrap: negative replication count");
    }
    const Params center = opt.center ? *opt.center : fit.theta_hat;
    if (opt.scheme.intensity_mode == IntensityMode::Recursive && !fit.sanity.overall) {
        throw std::invalid_argument(
            "run_bootstrap: recursive intensity bootstrap needs a sanity-passing fit "
            "(non-stationary estimates would generate explosive bootstrap paths)");
    }

    BootstrapRun run;
    run.scheme = opt.scheme;
    run.requested = opt.replications;
    run.seed = opt.seed;
    run.restricted = opt.center.has_value();
    run.center = center;

    const WaitSampler sampler(opt.scheme.wait_mode, opt.scheme.wait_mode == WaitMode::NonParametric
                                                        ? transformed_waiting_times(center, h)
                                                        : TransformedWaits{{}, center});
    std::optional<CompensatorTable> table;
    if (opt.scheme.intensity_mode == IntensityMode::Fixed) {
        table.emplace(center, h);
    }

    struct DrawResult {
        bool ok = false;
        std::optional<Params> theta;
        double lr = 0.0;
        int n = 0;
    };
    std::vector<DrawResult> draws(static_cast<std::size_t>(opt.replications));

    parallel_for(static_cast<std::size_t>(opt.replications), opt.threads, [&](std::size_t b) {
        Rng rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(b)}));
        DrawResult& out = draws[b];
        try {
            auto series = detail::generate_path(opt.scheme, center, h, sampler, table ? &*table : nullptr, rng);
            if (!series) {
                return;
            }
            // Scheme likelihood: FIB keeps the original intensity (and hence
            // the compensator term) fixed; RIB refits on the bootstrap series.
            const ObservedProcess obs = opt.scheme.intensity_mode == IntensityMode::Fixed
                                            ? ObservedProcess::driven_by(h, series->events())
                                            : ObservedProcess::of(*series);
            FitOptions fopt;
            fopt.family = fit.family;
            fopt.init = center;
            const FitResult boot_fit = fit_mle(obs, fopt);
            if (!boot_fit.converged) {
                return;
            }
            const double lr = 2.0 * (boot_fit.loglik - loglik(center, obs, fit.family));
            if (lr < -1e-8 * std::max(1.0, std::abs(boot_fit.loglik))) {
                return;
            }
            out.theta = boot_fit.theta_hat;
            out.lr = std::max(lr, 0.0);
            out.n = static_cast<int>(series->count());
            out.ok = true;
        } catch (const std::exception&) {
            out.ok = false;  // discard-and-count
        }
    });

    for (const auto& d : draws) {
        if (!d.ok) {
            ++run.discarded;
            continue;
        }
        run.theta_stars.push_back(*d.theta);
        run.lr_stars.push_back(d.lr);
        run.n_stars.push_back(d.n);
    }
    run.reliable = run.requested == 0 ||
                   run.discarded <= opt.max_discard_fraction * static_cast<double>(run.requested);
    return run;
}

/// Coordinates a bootstrap draw can be summarized by.
enum class Coord { Mu, Alpha, Beta, BranchingRatio, Delta };

inline double coord_value(const Params& p, Coord c) {
    switch (c) {
        case Coord::Mu: return p.mu;
        case Coord::Alpha: return p.kernel.alpha();
        case Coord::Beta: return p.kernel.beta();
        case Coord::BranchingRatio: return branching_ratio(p.kernel);
        case Coord::Delta: return p.kernel.delta();
    }
    throw std::logic_error("coord_value: unknown coordinate");
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Naive percentile interval: empirical alpha/2 and 1-alpha/2 quantiles of
/// the retained draws, using the ceil(q * B) order statistic.
inline Interval percentile_ci(const BootstrapRun& run, Coord coord, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("percentile_ci: level must be in (0,1)");
    }
    if (run.retained() < 2) {
        throw std::invalid_argument("percentile_ci: need at least two retained draws");
    }
    std::vector<double> values;
    values.reserve(run.theta_stars.size());
    for (const auto& p : run.theta_stars) {
        values.push_back(coord_value(p, coord));
    }
    std::sort(values.begin(), values.end());
    const double tail = 0.5 * (1.0 - level);
    return {quantile_order_stat(values, tail), quantile_order_stat(values, 1.0 - tail)};
}

enum class EllipsoidMethod { WaldQuantile, BootstrapCovariance };

struct EllipsoidCover {
    bool asymptotic = false;
    bool bootstrap = false;
};

namespace detail {

inline std::vector<double> coord_vector(const Params& p, ModelFamily family, Parameterization kind) {
    return param_vector(p, family, kind);
}

// Hessian of the fit in the requested parameterization (the FitResult stores
// it in the reporting form only; the exponential family converts exactly).
inline Matrix fit_hessian_as(const FitResult& fit, Parameterization kind) {
    if (kind == reporting_parameterization(fit.family)) {
        return fit.hessian;
    }
    if (fit.family != ModelFamily::ExponentialHawkes) {
        throw std::invalid_argument("fit_hessian_as: alternative parameterization only for the exponential kernel");
    }
    // stored in branching form (mu, a, beta); recover the natural form
    const auto br = param_vector(fit.theta_hat, fit.family, Parameterization::BranchingRatio);
    const double a = br[1];
    const double beta = br[2];
    Matrix m(3);  // d(mu,a,beta)/d(mu,alpha,beta)
    m(0, 0) = 1.0;
    m(1, 1) = 1.0 / beta;
    m(1, 2) = -a / beta;
    m(2, 2) = 1.0;
    Matrix hn = multiply(transpose(m), multiply(fit.hessian, m));
    // second derivatives of a(alpha, beta) = alpha/beta against the a-score
    const double s_a = fit.score[1];
    hn(1, 2) += s_a * (-1.0 / (beta * beta));
    hn(2, 1) += s_a * (-1.0 / (beta * beta));
    hn(2, 2) += s_a * (2.0 * a / (beta * beta));
    return hn;
}

// Negated Hessian of the fit, guaranteed positive definite.
inline Matrix wald_weight(const FitResult& fit, Parameterization kind) {
    const Matrix h = fit_hessian_as(fit, kind);
    const int d = h.size();
    Matrix neg(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) neg(i, j) = -h(i, j);
    if (!cholesky(neg)) {
        throw std::domain_error("wald_weight: Hessian is not negative definite (sanity failure)");
    }
    return neg;
}

inline double wald_distance(const Matrix& neg, const FitResult& fit, const Params& theta0, Parameterization kind) {
    const auto hat = coord_vector(fit.theta_hat, fit.family, kind);
    const auto v0 = coord_vector(theta0, fit.family, kind);
    std::vector<double> diff(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) diff[i] = hat[i] - v0[i];
    return quad_form(neg, diff);
}

}  // namespace detail

/// Asymptotic Wald ellipsoid:
/// (theta_hat - theta0)' (-H) (theta_hat - theta0) <= chi^2_d(level).
inline bool asymptotic_ellipsoid_covers(const FitResult& fit, const Params& theta0, double level,
                                        Parameterization kind) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("asymptotic_ellipsoid_covers: level must be in (0,1)");
    }
    const Matrix neg = detail::wald_weight(fit, kind);
    return detail::wald_distance(neg, fit, theta0, kind) <= chi2_quantile(level, param_dimension(fit.family));
}

/// Joint confidence ellipsoid coverage of theta0, in the requested
/// parameterization. The asymptotic ellipsoid is the Wald region; the
/// bootstrap version calibrates the same quadratic form by its empirical
/// bootstrap quantile (or, optionally, rescales with the bootstrap
/// covariance).
inline EllipsoidCover confidence_ellipsoid_cover(const BootstrapRun& run, const FitResult& fit,
                                                 const Params& theta0, double level, Parameterization kind,
                                                 EllipsoidMethod method = EllipsoidMethod::WaldQuantile) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence_ellipsoid_cover: level must be in (0,1)");
    }
    const ModelFamily family = fit.family;
    const int d = param_dimension(family);

    const Matrix neg = detail::wald_weight(fit, kind);
    const double q_obs = detail::wald_distance(neg, fit, theta0, kind);

    const auto hat = detail::coord_vector(fit.theta_hat, family, kind);
    const auto v0 = detail::coord_vector(theta0, family, kind);
    std::vector<double> diff(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) diff[static_cast<std::size_t>(i)] = hat[static_cast<std::size_t>(i)] - v0[static_cast<std::size_t>(i)];

    EllipsoidCover out;
    out.asymptotic = q_obs <= chi2_quantile(level, d);

    const Params center = run.center.value_or(fit.theta_hat);
    const auto vc = detail::coord_vector(center, family, kind);
    if (method == EllipsoidMethod::WaldQuantile) {
        std::vector<double> qs;
        qs.reserve(run.theta_stars.size());
        for (const auto& p : run.theta_stars) {
            const auto vb = detail::coord_vector(p, family, kind);
            std::vector<double> db(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) db[static_cast<std::size_t>(i)] = vb[static_cast<std::size_t>(i)] - vc[static_cast<std::size_t>(i)];
            qs.push_back(quad_form(neg, db));
        }
        if (qs.empty()) {
            throw std::invalid_argument("confidence_ellipsoid_cover: no retained bootstrap draws");
        }
        std::sort(qs.begin(), qs.end());
        out.bootstrap = q_obs <= quantile_order_stat(qs, level);
    } else {
        // Bootstrap covariance of the draws replaces (-H)^{-1}.
        const std::size_t b = run.theta_stars.size();
        if (b < static_cast<std::size_t>(d) + 1) {
            throw std::invalid_argument("confidence_ellipsoid_cover: too few draws for a covariance estimate");
        }
        std::vector<std::vector<double>> vs;
        vs.reserve(b);
        std::vector<double> mean_v(static_cast<std::size_t>(d), 0.0);
        for (const auto& p : run.theta_stars) {
            vs.push_back(detail::coord_vector(p, family, kind));
            for (int i = 0; i < d; ++i) mean_v[static_cast<std::size_t>(i)] += vs.back()[static_cast<std::size_t>(i)];
        }
        for (auto& m : mean_v) m /= static_cast<double>(b);
        Matrix cov(d);
        for (const auto& v : vs) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    cov(i, j) += (v[static_cast<std::size_t>(i)] - mean_v[static_cast<std::size_t>(i)]) *
                                 (v[static_cast<std::size_t>(j)] - mean_v[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) cov(i, j) /= static_cast<double>(b - 1);
        out.bootstrap = quad_form(spd_inverse(cov), diff) <= chi2_quantile(level, d);
    }
    return out;
}

/// Bootstrap p-value p = (1 + #{LR*_b >= LR_obs}) / (B_eff + 1).
inline double bootstrap_lr_pvalue(const BootstrapRun& run, double observed_lr) {
    int count = 0;
    for (double lr : run.lr_stars) {
        if (lr >= observed_lr) {
            ++count;
        }
    }
    return static_cast<double>(1 + count) / static_cast<double>(run.lr_stars.size() + 1);
}

}  // namespace hawkesboot
