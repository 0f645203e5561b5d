#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/intensity.hpp"
#include "hawkesboot/linalg.hpp"

namespace hawkesboot {

enum class ModelFamily { Poisson, ExponentialHawkes, PowerLawHawkes };
enum class Parameterization { Natural, BranchingRatio };

inline int param_dimension(ModelFamily f) {
    switch (f) {
        case ModelFamily::Poisson: return 1;
        case ModelFamily::ExponentialHawkes: return 3;
        case ModelFamily::PowerLawHawkes: return 4;
    }
    return 0;
}

/// Parameterization in which fits are run and results reported:
/// branching-ratio form for the exponential kernel, natural otherwise.
inline Parameterization reporting_parameterization(ModelFamily f) {
    return f == ModelFamily::ExponentialHawkes ? Parameterization::BranchingRatio : Parameterization::Natural;
}

inline std::vector<double> param_vector(const Params& p, ModelFamily f, Parameterization kind) {
    switch (f) {
        case ModelFamily::Poisson:
            return {p.mu};
        case ModelFamily::ExponentialHawkes: {
            const double alpha = p.kernel.alpha();
            const double beta = p.kernel.beta();
            if (kind == Parameterization::Natural) {
                return {p.mu, alpha, beta};
            }
            return {p.mu, alpha / beta, beta};
        }
        case ModelFamily::PowerLawHawkes: {
            if (kind == Parameterization::Natural) {
                return {p.mu, p.kernel.alpha(), p.kernel.beta(), p.kernel.delta()};
            }
            const double a = branching_ratio(p.kernel);
            if (!std::isfinite(a)) {
                throw std::domain_error("param_vector: power-law branching ratio is infinite (delta <= 1)");
            }
            return {p.mu, a, p.kernel.beta(), p.kernel.delta()};
        }
    }
    throw std::logic_error("param_vector: unknown family");
}

inline Params params_from_vector(std::span<const double> v, ModelFamily f, Parameterization kind) {
    switch (f) {
        case ModelFamily::Poisson:
            return Params(v[0], Kernel::exponential(0.0, 1.0));
        case ModelFamily::ExponentialHawkes:
            if (kind == Parameterization::Natural) {
                return Params(v[0], Kernel::exponential(v[1], v[2]));
            }
            return Params::exponential_branching(v[0], v[1], v[2]);
        case ModelFamily::PowerLawHawkes:
            if (kind == Parameterization::Natural) {
                return Params(v[0], Kernel::power_law(v[1], v[2], v[3]));
            }
            if (!(v[3] > 1.0)) {
                throw std::domain_error("params_from_vector: branching form needs delta > 1");
            }
            return Params(v[0], Kernel::power_law(v[1] * (v[3] - 1.0) * std::pow(v[2], v[3] - 1.0), v[2], v[3]));
    }
    throw std::logic_error("params_from_vector: unknown family");
}

/// Inputs of a point-process likelihood: the events that drive the intensity
/// (`history`) and the events counted in the log sum (`observed`).
///
/// For an ordinary sample the two coincide (observed = sample events,
/// history additionally holds the burn-in). The fixed intensity bootstrap
/// evaluates bootstrap event times against the intensity of the original
/// data, which is exactly the observed != history case.
struct ObservedProcess {
    std::span<const double> history;
    std::span<const double> observed;
    double horizon = 0.0;

    static ObservedProcess of(const EventSeries& s) {
        return {s.history(), s.events(), s.horizon()};
    }

    static ObservedProcess driven_by(const EventSeries& driver, std::span<const double> observed) {
        return {driver.history(), observed, driver.horizon()};
    }
};

namespace detail {

struct ExpEval {
    double value = 0.0;
    // score in the natural parameterization (mu, alpha, beta)
    double s_mu = 0.0, s_alpha = 0.0, s_beta = 0.0;
    double h_mm = 0.0, h_ma = 0.0, h_mb = 0.0, h_aa = 0.0, h_ab = 0.0, h_bb = 0.0;
};

// Log-likelihood of the exponential-kernel model with analytic derivatives up
// to the requested order, in one O(|history| + |observed|) scan. The memory
// sums A, D, E (plain, time-weighted, time-squared-weighted) are decayed and
// re-anchored at each ingested history event.
inline ExpEval exp_eval(double mu, double alpha, double beta, const ObservedProcess& o, int order) {
    ExpEval out;
    const double T = o.horizon;

    double A = 0.0, D = 0.0, E = 0.0;
    double anchor = o.history.empty() ? 0.0 : o.history.front();
    std::size_t next = 0;
    for (double u : o.observed) {
        while (next < o.history.size() && o.history[next] < u) {
            const double h = o.history[next];
            const double dt = h - anchor;
            const double dec = std::exp(-beta * dt);
            if (order >= 2) E = dec * (E + 2.0 * dt * D + dt * dt * A);
            if (order >= 1) D = dec * (D + dt * A);
            A = dec * A + 1.0;
            anchor = h;
            ++next;
        }
        const double dq = u - anchor;
        const double dec = std::exp(-beta * dq);
        const double s = dec * A;
        const double lam = mu + alpha * s;
        out.value += std::log(lam);
        if (order >= 1) {
            const double dsum = dec * (D + dq * A);
            const double inv = 1.0 / lam;
            out.s_mu += inv;
            out.s_alpha += s * inv;
            out.s_beta -= alpha * dsum * inv;
            if (order >= 2) {
                const double esum = dec * (E + 2.0 * dq * D + dq * dq * A);
                const double w = inv * inv;
                out.h_mm -= w;
                out.h_ma -= s * w;
                out.h_mb += alpha * dsum * w;
                out.h_aa -= s * s * w;
                out.h_ab += (-dsum * lam + alpha * s * dsum) * w;
                out.h_bb += (alpha * esum * lam - alpha * alpha * dsum * dsum) * w;
            }
        }
    }

    // Compensator: alpha * sum_j (exp(-beta a_j) - exp(-beta b_j)) / beta with
    // a_j the elapsed time at the start of [0,T] and b_j at its end.
    double f_sum = 0.0, fp_sum = 0.0, fpp_sum = 0.0;
    for (double h : o.history) {
        const double a = h < 0.0 ? -h : 0.0;
        const double b = T - h;
        const double ea = std::exp(-beta * a);
        const double eb = std::exp(-beta * b);
        const double g = a == 0.0 ? -std::expm1(-beta * b) : ea - eb;
        f_sum += g / beta;
        if (order >= 1) {
            const double gp = -a * ea + b * eb;
            fp_sum += gp / beta - g / (beta * beta);
            if (order >= 2) {
                const double gpp = a * a * ea - b * b * eb;
                fpp_sum += gpp / beta - 2.0 * gp / (beta * beta) + 2.0 * g / (beta * beta * beta);
            }
        }
    }
    out.value -= mu * T + alpha * f_sum;
    if (order >= 1) {
        out.s_mu -= T;
        out.s_alpha -= f_sum;
        out.s_beta -= alpha * fp_sum;
        if (order >= 2) {
            out.h_ab -= fp_sum;
            out.h_bb -= alpha * fpp_sum;
        }
    }
    return out;
}

inline double power_law_loglik(double mu, const Kernel& k, const ObservedProcess& o) {
    double value = 0.0;
    std::size_t next = 0;
    for (double u : o.observed) {
        while (next < o.history.size() && o.history[next] < u) {
            ++next;
        }
        double lam = mu;
        for (std::size_t j = 0; j < next; ++j) {
            lam += kernel_value(k, u - o.history[j]);
        }
        value += std::log(lam);
    }
    double comp = mu * o.horizon;
    for (double h : o.history) {
        const double from = h < 0.0 ? -h : 0.0;
        comp += kernel_integral(k, o.horizon - h) - kernel_integral(k, from);
    }
    return value - comp;
}

}  // namespace detail

/// Log-likelihood l_T(theta): event sum over the observed times, compensator
/// integrated over the full window [0, T].
inline double loglik(const Params& p, const ObservedProcess& o, ModelFamily family) {
    switch (family) {
        case ModelFamily::Poisson:
            return static_cast<double>(o.observed.size()) * std::log(p.mu) - p.mu * o.horizon;
        case ModelFamily::ExponentialHawkes:
            if (p.kernel.family() != KernelFamily::Exponential) {
                throw std::invalid_argument("loglik: exponential family needs an exponential kernel");
            }
            return detail::exp_eval(p.mu, p.kernel.alpha(), p.kernel.beta(), o, 0).value;
        case ModelFamily::PowerLawHawkes:
            if (p.kernel.family() != KernelFamily::PowerLaw) {
                throw std::invalid_argument("loglik: power-law family needs a power-law kernel");
            }
            return detail::power_law_loglik(p.mu, p.kernel, o);
    }
    throw std::logic_error("loglik: unknown family");
}

inline double loglik(const Params& p, const EventSeries& h, ModelFamily family) {
    return loglik(p, ObservedProcess::of(h), family);
}

namespace detail {

inline std::vector<double> score_natural_to_branching(std::span<const double> s_nat, double a, double beta) {
    // (mu, a, beta) with alpha = a * beta
    return {s_nat[0], beta * s_nat[1], a * s_nat[1] + s_nat[2]};
}

inline Matrix hessian_natural_to_branching(const Matrix& h_nat, double s_alpha, double a, double beta) {
    Matrix j(3);
    j(0, 0) = 1.0;
    j(1, 1) = beta;
    j(1, 2) = a;
    j(2, 2) = 1.0;
    Matrix h = multiply(transpose(j), multiply(h_nat, j));
    h(1, 2) += s_alpha;  // d^2 alpha / da dbeta = 1
    h(2, 1) += s_alpha;
    return h;
}

inline std::vector<double> fd_score(const Params& p, const ObservedProcess& o, ModelFamily family) {
    const auto v = param_vector(p, family, Parameterization::Natural);
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double step = 1e-6 * (1.0 + std::abs(v[i]));
        auto hi = v;
        auto lo = v;
        hi[i] += step;
        lo[i] -= step;
        g[i] = (loglik(params_from_vector(hi, family, Parameterization::Natural), o, family) -
                loglik(params_from_vector(lo, family, Parameterization::Natural), o, family)) /
               (2.0 * step);
    }
    return g;
}

}  // namespace detail

/// Score S_T(theta), analytic for the Poisson and exponential families,
/// central finite differences for the power law.
inline std::vector<double> score(const Params& p, const ObservedProcess& o, ModelFamily family,
                                 Parameterization kind) {
    switch (family) {
        case ModelFamily::Poisson:
            return {static_cast<double>(o.observed.size()) / p.mu - o.horizon};
        case ModelFamily::ExponentialHawkes: {
            const auto ev = detail::exp_eval(p.mu, p.kernel.alpha(), p.kernel.beta(), o, 1);
            const std::vector<double> nat{ev.s_mu, ev.s_alpha, ev.s_beta};
            if (kind == Parameterization::Natural) {
                return nat;
            }
            const double beta = p.kernel.beta();
            return detail::score_natural_to_branching(nat, p.kernel.alpha() / beta, beta);
        }
        case ModelFamily::PowerLawHawkes: {
            if (kind != Parameterization::Natural) {
                throw std::invalid_argument("score: power-law derivatives only in natural form");
            }
            return detail::fd_score(p, o, family);
        }
    }
    throw std::logic_error("score: unknown family");
}

inline std::vector<double> score(const Params& p, const EventSeries& h, ModelFamily family,
                                 Parameterization kind) {
    return score(p, ObservedProcess::of(h), family, kind);
}

/// Hessian H_T(theta); symmetric by construction.
inline Matrix hessian(const Params& p, const ObservedProcess& o, ModelFamily family, Parameterization kind) {
    switch (family) {
        case ModelFamily::Poisson: {
            Matrix h(1);
            h(0, 0) = -static_cast<double>(o.observed.size()) / (p.mu * p.mu);
            return h;
        }
        case ModelFamily::ExponentialHawkes: {
            const auto ev = detail::exp_eval(p.mu, p.kernel.alpha(), p.kernel.beta(), o, 2);
            Matrix h(3);
            h(0, 0) = ev.h_mm;
            h(0, 1) = h(1, 0) = ev.h_ma;
            h(0, 2) = h(2, 0) = ev.h_mb;
            h(1, 1) = ev.h_aa;
            h(1, 2) = h(2, 1) = ev.h_ab;
            h(2, 2) = ev.h_bb;
            if (kind == Parameterization::Natural) {
                return h;
            }
            const double beta = p.kernel.beta();
            return detail::hessian_natural_to_branching(h, ev.s_alpha, p.kernel.alpha() / beta, beta);
        }
        case ModelFamily::PowerLawHawkes: {
            if (kind != Parameterization::Natural) {
                throw std::invalid_argument("hessian: power-law derivatives only in natural form");
            }
            const auto v = param_vector(p, family, Parameterization::Natural);
            const int d = static_cast<int>(v.size());
            Matrix h(d);
            for (int i = 0; i < d; ++i) {
                const double step = 1e-5 * (1.0 + std::abs(v[static_cast<std::size_t>(i)]));
                auto hi = v;
                auto lo = v;
                hi[static_cast<std::size_t>(i)] += step;
                lo[static_cast<std::size_t>(i)] -= step;
                const auto ghi = detail::fd_score(params_from_vector(hi, family, Parameterization::Natural), o, family);
                const auto glo = detail::fd_score(params_from_vector(lo, family, Parameterization::Natural), o, family);
                for (int j = 0; j < d; ++j) {
                    h(i, j) = (ghi[static_cast<std::size_t>(j)] - glo[static_cast<std::size_t>(j)]) / (2.0 * step);
                }
            }
            // enforce exact symmetry
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    const double m = 0.5 * (h(i, j) + h(j, i));
                    h(i, j) = h(j, i) = m;
                }
            return h;
        }
    }
    throw std::logic_error("hessian: unknown family");
}

inline Matrix hessian(const Params& p, const EventSeries& h, ModelFamily family, Parameterization kind) {
    return hessian(p, ObservedProcess::of(h), family, kind);
}

/// Post-fit gate: estimate inside the stationarity region and a negative
/// definite Hessian.
struct SanityVerdict {
    bool stationary = false;
    bool hessian_nd = false;
    bool overall = false;
};

struct FitResult {
    Params theta_hat;
    ModelFamily family = ModelFamily::ExponentialHawkes;
    double loglik = 0.0;
    std::vector<double> score;  // in reporting_parameterization(family)
    Matrix hessian;
    bool converged = false;
    int iterations = 0;
    SanityVerdict sanity;
};

struct FitOptions {
    ModelFamily family = ModelFamily::ExponentialHawkes;
    std::optional<Params> init;
    double gradient_tolerance = 1e-8;
    double parameter_tolerance = 1e-10;
    int max_iterations = 500;
    // Optional box bounds in the fit parameterization (natural scale).
    std::optional<std::vector<double>> lower;
    std::optional<std::vector<double>> upper;
};

namespace detail {

struct LogObjective {
    const ObservedProcess* obs;
    ModelFamily family;
    Parameterization kind;

    [[nodiscard]] Params make_params(std::span<const double> x) const {
        std::vector<double> v(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::exp(x[i]);
        return params_from_vector(v, family, kind);
    }

    [[nodiscard]] double value(std::span<const double> x) const {
        return loglik(make_params(x), *obs, family);
    }

    // Gradient with respect to the log parameters.
    [[nodiscard]] std::vector<double> gradient(std::span<const double> x) const {
        const Params p = make_params(x);
        auto g = (family == ModelFamily::PowerLawHawkes)
                     ? fd_score(p, *obs, family)
                     : score(p, *obs, family, kind);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= std::exp(x[i]);
        return g;
    }

    // Analytic Hessian in log coordinates (exponential/Poisson only).
    [[nodiscard]] Matrix log_hessian(std::span<const double> x, std::span<const double> g_log) const {
        const Params p = make_params(x);
        Matrix h = hessian(p, *obs, family, kind);
        const int d = h.size();
        for (int i = 0; i < d; ++i) {
            const double ti = std::exp(x[static_cast<std::size_t>(i)]);
            for (int j = 0; j < d; ++j) {
                h(i, j) *= ti * std::exp(x[static_cast<std::size_t>(j)]);
            }
        }
        for (int i = 0; i < d; ++i) {
            h(i, i) += g_log[static_cast<std::size_t>(i)];  // theta_i * S_i term
        }
        return h;
    }
};

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Params default_init(const ObservedProcess& o, ModelFamily family) {
    const auto n = static_cast<double>(o.observed.size());
    if (n < 1.0) {
        throw std::invalid_argument("fit_mle: cannot fit a model to an empty sample");
    }
    const double mu0 = std::max(0.5 * n / o.horizon, 1e-8);
    const double last = o.observed.back();
    const double beta0 = last > 0.0 ? n / last : 1.0;  // 1 / mean waiting time
    switch (family) {
        case ModelFamily::Poisson:
            return Params(std::max(n / o.horizon, 1e-8), Kernel::exponential(0.0, 1.0));
        case ModelFamily::ExponentialHawkes:
            return Params::exponential_branching(mu0, 0.5, beta0);
        case ModelFamily::PowerLawHawkes:
            return Params(mu0, Kernel::power_law(0.5, 1.0, 2.0));
    }
    throw std::logic_error("default_init: unknown family");
}

}  // namespace likelihood detail

/// Maximum likelihood fit by BFGS ascent over log parameters (log mu, log a,
/// log beta for the exponential kernel), followed by a few Newton polish
/// steps where the analytic Hessian is available. Stationarity is not
/// imposed; the sanity verdict reports it instead.
inline FitResult fit_mle(const ObservedProcess& o, const FitOptions& opt = {}) {
    const ModelFamily family = opt.family;
    const Parameterization kind = reporting_parameterization(family);
    const int d = param_dimension(family);
    detail::LogObjective obj{&o, family, kind};

    const Params init = opt.init ? *opt.init : detail::default_init(o, family);
    std::vector<double> x(static_cast<std::size_t>(d));
    {
        const auto v0 = param_vector(init, family, kind);
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = std::log(v0[static_cast<std::size_t>(i)]);
    }
    std::vector<double> xlo(static_cast<std::size_t>(d), -46.0), xhi(static_cast<std::size_t>(d), 46.0);
    if (opt.lower) {
        for (int i = 0; i < d; ++i) xlo[static_cast<std::size_t>(i)] = std::log((*opt.lower)[static_cast<std::size_t>(i)]);
    }
    if (opt.upper) {
        for (int i = 0; i < d; ++i) xhi[static_cast<std::size_t>(i)] = std::log((*opt.upper)[static_cast<std::size_t>(i)]);
    }
    auto clamp_box = [&](std::vector<double>& v) {
        for (int i = 0; i < d; ++i) {
            auto k = static_cast<std::size_t>(i);
            v[k] = std::clamp(v[k], xlo[k], xhi[k]);
        }
    };
    clamp_box(x);

    double value = obj.value(x);
    std::vector<double> grad = obj.gradient(x);
    if (!std::isfinite(value)) {
        throw std::invalid_argument("fit_mle: log-likelihood not finite at the initial point");
    }

    Matrix binv(d);
    for (int i = 0; i < d; ++i) binv(i, i) = 1.0;
    bool converged = false;
    int iterations = 0;

    for (; iterations < opt.max_iterations; ++iterations) {
        if (detail::max_abs(grad) <= opt.gradient_tolerance * std::max(1.0, std::abs(value))) {
            converged = true;
            break;
        }
        std::vector<double> dir(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) dir[static_cast<std::size_t>(i)] += binv(i, j) * grad[static_cast<std::size_t>(j)];
        double slope = detail::dot(dir, grad);
        if (!(slope > 0.0)) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) binv(i, j) = i == j ? 1.0 : 0.0;
            }
            dir = grad;
            slope = detail::dot(grad, grad);
        }

        // Backtracking line search; the likelihood increases monotonically
        // along the accepted trajectory.
        double step = 1.0;
        bool accepted = false;
        std::vector<double> xn(static_cast<std::size_t>(d));
        double vn = value;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < d; ++i) xn[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + step * dir[static_cast<std::size_t>(i)];
            clamp_box(xn);
            vn = obj.value(xn);
            if (std::isfinite(vn) && vn >= value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;  // stalled; convergence decided by the gradient test above
        }

        std::vector<double> s(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) s[static_cast<std::size_t>(i)] = xn[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
        const auto gn = obj.gradient(xn);
        std::vector<double> y(static_cast<std::size_t>(d));  // BFGS curvature pair for -loglik
        for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(i)] - gn[static_cast<std::size_t>(i)];
        const double ys = detail::dot(y, s);
        if (ys > 1e-12) {
            // inverse BFGS update
            std::vector<double> by(static_cast<std::size_t>(d), 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) by[static_cast<std::size_t>(i)] += binv(i, j) * y[static_cast<std::size_t>(j)];
            const double yby = detail::dot(y, by);
            const double rho = 1.0 / ys;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    binv(i, j) += rho * rho * (ys + yby) * s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] -
                                  rho * (by[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] +
                                         s[static_cast<std::size_t>(i)] * by[static_cast<std::size_t>(j)]);
                }
            }
        }

        const double step_size = detail::max_abs(s);
        x = xn;
        value = vn;
        grad = gn;
        if (step_size <= opt.parameter_tolerance * (1.0 + detail::max_abs(x))) {
            converged = true;
            break;
        }
    }

    // Newton polish sharpens the first-order condition to near machine
    // precision when the analytic Hessian is available.
    if (converged && family != ModelFamily::PowerLawHawkes) {
        for (int polish = 0; polish < 5; ++polish) {
            const Matrix hlog = obj.log_hessian(x, grad);
            Matrix neg(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) neg(i, j) = -hlog(i, j);
            const auto chol = cholesky(neg);
            if (!chol) {
                break;
            }
            const auto delta = cholesky_solve(*chol, grad);
            std::vector<double> xn(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) xn[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + delta[static_cast<std::size_t>(i)];
            clamp_box(xn);
            const double vn = obj.value(xn);
            if (!std::isfinite(vn) || vn < value - 1e-12 * (1.0 + std::abs(value))) {
                break;
            }
            const auto gn = obj.gradient(xn);
            if (detail::max_abs(gn) >= detail::max_abs(grad)) {
                break;
            }
            x = xn;
            value = vn;
            grad = gn;
        }
    }

    const Params theta = obj.make_params(x);
    FitResult result{theta, family, value, score(theta, o, family, kind), hessian(theta, o, family, kind),
                     converged, iterations, SanityVerdict{}};
    result.sanity.stationary = family == ModelFamily::Poisson || branching_ratio(theta.kernel) < 1.0;
    result.sanity.hessian_nd = negative_definite(result.hessian);
    result.sanity.overall = result.sanity.stationary && result.sanity.hessian_nd;
    return result;
}

inline FitResult fit_mle(const EventSeries& h, const FitOptions& opt = {}) {
    return fit_mle(ObservedProcess::of(h), opt);
}

/// Likelihood ratio statistic LR_T(theta0) = 2 (l_T(theta_hat) - l_T(theta0)).
/// Small negative values within numerical slack are clamped to zero; anything
/// beyond the slack signals an optimizer failure.
inline double lr_statistic(const EventSeries& h, const Params& theta0, const FitResult& fit) {
    const double l0 = loglik(theta0, h, fit.family);
    const double lr = 2.0 * (fit.loglik - l0);
    const double slack = 1e-8 * std::max(1.0, std::abs(fit.loglik));
    if (lr < -slack) {
        throw std::runtime_error("lr_statistic: negative LR beyond numerical slack; fit did not reach the optimum");
    }
    return std::max(lr, 0.0);
}

}  // namespace hawkesboot
