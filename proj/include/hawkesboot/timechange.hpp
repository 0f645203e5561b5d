#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/intensity.hpp"

namespace hawkesboot {

/// Waiting times in the transformed (compensator) time scale,
/// v_i = Lambda(t_i) - Lambda(t_{i-1}) with t_0 = 0.
struct TransformedWaits {
    std::vector<double> values;
    Params theta_used;
};

namespace detail {

// Extra integrated intensity accumulated over (base, base + dt] by history
// events at or before base.
inline double segment_mass_exp(const Kernel& k, double memory_sum, double dt) {
    return -(k.alpha() / k.beta()) * std::expm1(-k.beta() * dt) * memory_sum;
}

inline double segment_mass_general(const Kernel& k, std::span<const double> history_upto_base,
                                   double base, double dt) {
    double acc = 0.0;
    for (double h : history_upto_base) {
        acc += kernel_integral(k, base + dt - h) - kernel_integral(k, base - h);
    }
    return acc;
}

struct SegmentProblem {
    const Params* params;
    // Exponential kernel: memory sum at base. Power law: events <= base.
    double memory_sum = 0.0;
    std::span<const double> history;
    double base = 0.0;

    [[nodiscard]] double mass(double dt) const {
        const Kernel& k = params->kernel;
        const double base_mass = params->mu * dt;
        if (k.family() == KernelFamily::Exponential) {
            return base_mass + segment_mass_exp(k, memory_sum, dt);
        }
        return base_mass + segment_mass_general(k, history, base, dt);
    }

    [[nodiscard]] double slope(double dt) const {
        const Kernel& k = params->kernel;
        if (k.family() == KernelFamily::Exponential) {
            return params->mu + k.alpha() * memory_sum * std::exp(-k.beta() * dt);
        }
        double acc = params->mu;
        for (double h : history) {
            acc += kernel_value(k, base + dt - h);
        }
        return acc;
    }
};

// Solve mass(dt) = target for dt >= 0 by safeguarded Newton. mass is strictly
// increasing with slope >= mu, which guarantees the bracket [0, target/mu].
inline double solve_segment(const SegmentProblem& prob, double target, double scale) {
    if (!(target >= 0.0)) {
        throw std::domain_error("solve_segment: target must be >= 0");
    }
    if (target == 0.0) {
        return 0.0;
    }
    // Absolute-relative hybrid, capped so that compensator increments round
    // trip to 1e-8 even when the transformed scale runs into the hundreds.
    const double tol = std::min(1e-10 * std::max(1.0, scale), 2e-9);
    double lo = 0.0;
    double hi = target / prob.params->mu;
    double dt = target / prob.slope(0.0);  // first-order guess
    for (int it = 0; it < 100; ++it) {
        const double f = prob.mass(dt) - target;
        if (std::abs(f) <= tol) {
            return dt;
        }
        (f < 0.0 ? lo : hi) = dt;
        const double step = f / prob.slope(dt);
        double next = dt - step;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        dt = next;
    }
    throw std::runtime_error("solve_segment: no convergence after 100 iterations (target=" +
                             std::to_string(target) + ", bracket=[" + std::to_string(lo) + "," +
                             std::to_string(hi) + "])");
}

}  // namespace detail

/// Transformed waiting times v_i(theta) of the sample events. Under the data
/// generating theta these are i.i.d. unit exponentials.
inline TransformedWaits transformed_waiting_times(const Params& params, const EventSeries& h) {
    TransformedWaits out{{}, params};
    out.values.reserve(h.count());
    const Kernel& k = params.kernel;
    if (k.family() == KernelFamily::Exponential) {
        ExpState state;
        state.last_time = h.start();
        for (double u : h.pre_sample()) {
            state.advance(u, k.beta());
            state.add_event();
        }
        state.advance(0.0, k.beta());
        double prev = 0.0;
        for (double t : h.events()) {
            const double w = t - prev;
            out.values.push_back(params.mu * w + detail::segment_mass_exp(k, state.s_value, w));
            state.advance(t, k.beta());
            state.add_event();
            prev = t;
        }
        return out;
    }
    const auto hist = h.history();
    std::size_t upto = h.pre_sample().size();
    double prev = 0.0;
    for (double t : h.events()) {
        out.values.push_back(params.mu * (t - prev) +
                             detail::segment_mass_general(k, hist.subspan(0, upto), prev, t - prev));
        ++upto;
        prev = t;
    }
    return out;
}

/// Precomputed integrated intensity of a fixed event history at a fixed
/// parameter point, with exact piecewise evaluation and inversion between the
/// event knots. This is the object the fixed intensity bootstrap inverts.
class CompensatorTable {
public:
    CompensatorTable(Params params, const EventSeries& h)
        : params_(std::move(params)), history_(h.history().begin(), h.history().end()), horizon_(h.horizon()) {
        build();
    }

    /// Lambda_hat(t) for t in [0, horizon].
    [[nodiscard]] double value(double t) const {
        if (!(t >= 0.0 && t <= horizon_)) {
            throw std::domain_error("CompensatorTable::value: t outside [0, horizon]");
        }
        const std::size_t seg = segment_below(knot_times_, t);
        return knot_values_[seg] + segment(seg).mass(t - knot_times_[seg]);
    }

    /// Total mass Lambda_hat(T).
    [[nodiscard]] double total() const { return knot_values_.back(); }

    /// Inverse time change: t with Lambda_hat(t) = s, or nullopt when s
    /// exceeds the horizon mass (the out-of-horizon signal that terminates a
    /// bootstrap draw).
    [[nodiscard]] std::optional<double> invert(double s) const {
        if (!(s >= 0.0)) {
            throw std::domain_error("CompensatorTable::invert: s must be >= 0");
        }
        if (s > total()) {
            return std::nullopt;
        }
        if (s == total()) {
            return horizon_;
        }
        const std::size_t seg = segment_below(knot_values_, s);
        const double dt = detail::solve_segment(segment(seg), s - knot_values_[seg], s);
        return std::min(knot_times_[seg] + dt, horizon_);
    }

    [[nodiscard]] const Params& params() const { return params_; }
    [[nodiscard]] double horizon() const { return horizon_; }

private:
    static std::size_t segment_below(const std::vector<double>& knots, double x) {
        const auto it = std::upper_bound(knots.begin(), knots.end(), x);
        const auto idx = static_cast<std::size_t>(it - knots.begin());
        return std::min(idx == 0 ? 0 : idx - 1, knots.size() - 2);
    }

    [[nodiscard]] detail::SegmentProblem segment(std::size_t seg) const {
        detail::SegmentProblem prob;
        prob.params = &params_;
        prob.base = knot_times_[seg];
        if (params_.kernel.family() == KernelFamily::Exponential) {
            prob.memory_sum = knot_memory_[seg];
        } else {
            prob.history = std::span<const double>(history_).subspan(0, knot_counts_[seg]);
        }
        return prob;
    }

    void build() {
        // Knots: time 0, every event in (0, horizon), and the horizon itself.
        knot_times_.push_back(0.0);
        for (double t : history_) {
            if (t > 0.0 && t < horizon_) {
                knot_times_.push_back(t);
            }
        }
        knot_times_.push_back(horizon_);

        const Kernel& k = params_.kernel;
        knot_values_.resize(knot_times_.size());
        knot_counts_.resize(knot_times_.size());
        knot_memory_.resize(knot_times_.size());

        ExpState state;
        state.last_time = history_.empty() ? 0.0 : std::min(history_.front(), 0.0);
        std::size_t next_event = 0;
        double lambda_mass = 0.0;
        for (std::size_t i = 0; i < knot_times_.size(); ++i) {
            const double t = knot_times_[i];
            if (i > 0) {
                const double prev = knot_times_[i - 1];
                if (k.family() == KernelFamily::Exponential) {
                    lambda_mass += params_.mu * (t - prev) +
                                   detail::segment_mass_exp(k, knot_memory_[i - 1], t - prev);
                } else {
                    lambda_mass += params_.mu * (t - prev) +
                                   detail::segment_mass_general(
                                       k, std::span<const double>(history_).subspan(0, knot_counts_[i - 1]), prev,
                                       t - prev);
                }
            }
            // Ingest history events up to and including this knot.
            while (next_event < history_.size() && history_[next_event] <= t) {
                if (k.family() == KernelFamily::Exponential) {
                    state.advance(history_[next_event], k.beta());
                    state.add_event();
                }
                ++next_event;
            }
            if (k.family() == KernelFamily::Exponential) {
                state.advance(t, k.beta());
                knot_memory_[i] = state.s_value;
            }
            knot_counts_[i] = next_event;
            knot_values_[i] = lambda_mass;
        }
    }

    Params params_;
    std::vector<double> history_;
    double horizon_;
    std::vector<double> knot_times_;
    std::vector<double> knot_values_;
    std::vector<std::size_t> knot_counts_;  // events <= knot
    std::vector<double> knot_memory_;       // exponential memory sum at knot
};

/// One-shot fixed-intensity inversion (builds the knot table internally).
inline std::optional<double> invert_fixed(const Params& params, const EventSeries& h, double s) {
    return CompensatorTable(params, h).invert(s);
}

/// Event path grown by recursively inverting its own compensator: each call
/// to advance() turns the next transformed waiting time into an event time.
/// Used by the recursive intensity bootstrap and the time-change simulator.
class RecursivePath {
public:
    RecursivePath(Params params, std::span<const double> pre_history, double start_time, double horizon)
        : params_(std::move(params)),
          history_(pre_history.begin(), pre_history.end()),
          fixed_prefix_(pre_history.size()),
          horizon_(horizon),
          current_(start_time) {
        if (!pre_history.empty() && !(pre_history.back() <= start_time)) {
            throw std::invalid_argument("RecursivePath: pre-history must end before the start time");
        }
        state_.last_time = history_.empty() ? start_time : history_.front();
        for (double u : history_) {
            state_.advance(u, params_.kernel.beta());
            state_.add_event();
        }
        state_.advance(start_time, params_.kernel.beta());
    }

    /// Next event time for transformed wait v > 0, or nullopt once the
    /// solution passes the horizon (the path is finished then).
    std::optional<double> advance(double v) {
        if (!(v > 0.0)) {
            throw std::domain_error("RecursivePath::advance: wait must be > 0");
        }
        detail::SegmentProblem prob;
        prob.params = &params_;
        prob.base = current_;
        if (params_.kernel.family() == KernelFamily::Exponential) {
            prob.memory_sum = state_.s_value;
        } else {
            prob.history = history_;
        }
        transformed_total_ += v;
        const double dt = detail::solve_segment(prob, v, transformed_total_);
        const double t = current_ + dt;
        if (t > horizon_) {
            return std::nullopt;
        }
        history_.push_back(t);
        current_ = t;
        if (params_.kernel.family() == KernelFamily::Exponential) {
            state_.advance(t, params_.kernel.beta());
            state_.add_event();
        }
        return t;
    }

    [[nodiscard]] std::span<const double> generated() const {
        return std::span<const double>(history_).subspan(fixed_prefix_);
    }

    [[nodiscard]] const std::vector<double>& history() const { return history_; }

private:
    Params params_;
    std::vector<double> history_;
    std::size_t fixed_prefix_;
    double horizon_;
    double current_;
    double transformed_total_ = 0.0;
    ExpState state_;
};

/// Single recursive-inversion step: the event time t solving
/// s_next = s_prev + int_{t_prev}^{t} lambda*(u) du on the given bootstrap
/// history. nullopt when the root exceeds the horizon.
inline std::optional<double> invert_recursive(const Params& params, const EventSeries& boot_history,
                                              double s_prev, double s_next) {
    if (!(s_next > s_prev)) {
        throw std::domain_error("invert_recursive: s_next must exceed s_prev");
    }
    const double t_prev = boot_history.events().empty() ? 0.0 : boot_history.events().back();
    RecursivePath path(params, boot_history.history(), t_prev, boot_history.horizon());
    return path.advance(s_next - s_prev);
}

}  // namespace hawkesboot
