#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/kernels.hpp"

namespace hawkesboot {

/// Full parameter point of a self-exciting process: baseline intensity plus
/// excitation kernel.
struct Params {
    double mu;
    Kernel kernel;

    Params(double mu_, Kernel kernel_) : mu(mu_), kernel(kernel_) {
        if (!(std::isfinite(mu) && mu > 0.0)) {
            throw std::invalid_argument("Params: mu must be finite and > 0");
        }
    }

    /// Exponential kernel in the branching-ratio parameterization (mu, a, beta),
    /// alpha = a * beta.
    static Params exponential_branching(double mu, double a, double beta) {
        return Params(mu, Kernel::exponential(a * beta, beta));
    }
};

[[nodiscard]] inline bool stationary(const Params& p) {
    return branching_ratio(p.kernel) < 1.0;
}

/// Stationary mean intensity m = mu / (1 - a).
inline double mean_intensity(const Params& p) {
    const double a = branching_ratio(p.kernel);
    if (!(a < 1.0)) {
        throw std::domain_error("mean_intensity: process is not stationary (branching ratio >= 1)");
    }
    return p.mu / (1.0 - a);
}

/// Decaying memory sum of the exponential kernel,
/// s_value = sum_{t_j <= last_time} exp(-beta (last_time - t_j)).
///
/// Carrying this single number forward is what makes every exponential-kernel
/// computation in the library O(n).
struct ExpState {
    double last_time = 0.0;
    double s_value = 0.0;

    /// Decay to time t >= last_time with no intervening events.
    void advance(double t, double beta) {
        s_value *= std::exp(-beta * (t - last_time));
        last_time = t;
    }

    /// Register an event at last_time.
    void add_event() { s_value += 1.0; }
};

/// lambda(t) evaluation over a fixed history, for non-decreasing t queries.
/// Exponential kernels use the ExpState recursion (O(1) amortized); power-law
/// kernels fall back to direct summation.
class IntensityScanner {
public:
    IntensityScanner(const Params& params, std::span<const double> history, double start_time)
        : params_(&params), history_(history) {
        state_.last_time = start_time;
    }

    /// lambda(t) with the strict left-limit convention (events at u < t count,
    /// an event exactly at t does not). Queries must be non-decreasing.
    double lambda(double t) {
        const Kernel& k = params_->kernel;
        if (k.family() == KernelFamily::Exponential) {
            const double beta = k.beta();
            while (next_ < history_.size() && history_[next_] < t) {
                state_.advance(history_[next_], beta);
                state_.add_event();
                ++next_;
            }
            const double s = state_.s_value * std::exp(-beta * (t - state_.last_time));
            return params_->mu + k.alpha() * s;
        }
        while (next_ < history_.size() && history_[next_] < t) {
            ++next_;
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < next_; ++j) {
            sum += kernel_value(k, t - history_[j]);
        }
        return params_->mu + sum;
    }

private:
    const Params* params_;
    std::span<const double> history_;
    std::size_t next_ = 0;
    ExpState state_;
};

/// Conditional intensity lambda(t; theta) given the series' history.
inline double intensity_at(const Params& params, const EventSeries& h, double t) {
    if (!(t >= h.start() && t <= h.horizon())) {
        throw std::domain_error("intensity_at: t outside the observation window");
    }
    IntensityScanner scan(params, h.history(), h.start());
    return scan.lambda(t);
}

/// Integrated intensity Lambda(t; theta) = int_0^t lambda(s) ds, exact via
/// kernel antiderivatives. Pre-sample events contribute their mass on [0, t].
inline double integrated_intensity(const Params& params, const EventSeries& h, double t) {
    if (!(t >= 0.0 && t <= h.horizon())) {
        throw std::domain_error("integrated_intensity: t must lie in [0, horizon]");
    }
    double acc = params.mu * t;
    for (double u : h.history()) {
        if (u >= t) {
            break;
        }
        const double from = std::max(-u, 0.0);  // elapsed time at integration start
        acc += kernel_integral(params.kernel, t - u) - kernel_integral(params.kernel, from);
    }
    return acc;
}

}  // namespace hawkesboot
