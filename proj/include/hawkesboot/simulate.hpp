#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/intensity.hpp"
#include "hawkesboot/rng.hpp"
#include "hawkesboot/timechange.hpp"

namespace hawkesboot {

/// Guard against explosive (non-stationary) simulations running unbounded.
inline constexpr std::size_t kSimulationEventCap = 10'000'000;

/// Exact simulation on [-burn_in, horizon] by Ogata's thinning, starting from
/// an empty history. The proposal bound is the intensity just after the most
/// recent event (or rejection point), which dominates because the kernel is
/// non-increasing; it is re-tightened at every proposal.
///
/// Deterministic given the seed.
inline EventSeries simulate_thinning(const Params& params, double horizon, double burn_in, std::uint64_t seed) {
    if (!(horizon > 0.0) || !(burn_in >= 0.0)) {
        throw std::invalid_argument("simulate_thinning: need horizon > 0 and burn_in >= 0");
    }
    Rng rng(seed);
    const Kernel& k = params.kernel;
    const bool exponential = k.family() == KernelFamily::Exponential;
    const double jump = kernel_value(k, 0.0);

    std::vector<double> history;
    ExpState state;
    double t = -burn_in;
    state.last_time = t;
    double bound = params.mu;

    auto lambda_at = [&](double u) {
        if (exponential) {
            return params.mu + k.alpha() * state.s_value * std::exp(-k.beta() * (u - state.last_time));
        }
        double acc = params.mu;
        for (double h : history) {
            acc += kernel_value(k, u - h);
        }
        return acc;
    };

    while (true) {
        const double wait = rng.exp1() / bound;
        const double u = t + wait;
        if (u > horizon) {
            break;
        }
        const double lam = lambda_at(u);
        assert(lam <= bound * (1.0 + 1e-12));
        t = u;
        if (rng.uniform01() * bound <= lam) {
            history.push_back(u);
            if (exponential) {
                state.advance(u, k.beta());
                state.add_event();
            }
            bound = lam + jump;
            if (history.size() > kSimulationEventCap) {
                throw std::runtime_error(
                    "simulate_thinning: event cap exceeded (non-stationary parameters explode on a long window)");
            }
        } else {
            bound = lam;  // retighten between events
        }
    }
    return EventSeries::from_history(history, horizon);
}

/// Simulation by the random time change: i.i.d. unit-exponential waits in
/// transformed time, inverted recursively through the path's own compensator.
/// Distributionally equivalent to thinning; the two cross-validate each other.
inline EventSeries simulate_timechange(const Params& params, double horizon, double burn_in, std::uint64_t seed) {
    if (!(horizon > 0.0) || !(burn_in >= 0.0)) {
        throw std::invalid_argument("simulate_timechange: need horizon > 0 and burn_in >= 0");
    }
    Rng rng(seed);
    RecursivePath path(params, {}, -burn_in, horizon);
    while (path.advance(rng.exp1())) {
    }
    return EventSeries::from_history(path.history(), horizon);
}

}  // namespace hawkesboot
