#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hawkesboot {

/// Observed realization of a point process: optional pre-sample (burn-in)
/// events on [-M, 0), sample events on [0, T], and the horizon T.
///
/// Immutable after construction; the concatenated history is validated to be
/// strictly increasing.
class EventSeries {
public:
    EventSeries(std::vector<double> pre_sample, std::vector<double> events, double horizon)
        : horizon_(horizon) {
        if (!(std::isfinite(horizon) && horizon > 0.0)) {
            throw std::invalid_argument("EventSeries: horizon must be finite and > 0");
        }
        times_ = std::move(pre_sample);
        sample_begin_ = times_.size();
        times_.insert(times_.end(), events.begin(), events.end());
        validate();
    }

    /// Splits a full sorted history at time zero.
    static EventSeries from_history(const std::vector<double>& all_times, double horizon) {
        std::vector<double> pre, ev;
        for (double t : all_times) {
            (t < 0.0 ? pre : ev).push_back(t);
        }
        return EventSeries(std::move(pre), std::move(ev), horizon);
    }

    [[nodiscard]] std::span<const double> pre_sample() const {
        return {times_.data(), sample_begin_};
    }

    [[nodiscard]] std::span<const double> events() const {
        return {times_.data() + sample_begin_, times_.size() - sample_begin_};
    }

    /// Full conditioning history: pre-sample followed by sample events.
    [[nodiscard]] std::span<const double> history() const { return times_; }

    [[nodiscard]] double horizon() const { return horizon_; }

    /// Number of sample events n_T.
    [[nodiscard]] std::size_t count() const { return times_.size() - sample_begin_; }

    /// Earliest admissible query time (start of burn-in, or 0).
    [[nodiscard]] double start() const {
        return sample_begin_ > 0 ? times_.front() : 0.0;
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!std::isfinite(times_[i])) {
                throw std::invalid_argument("EventSeries: non-finite event time at index " + std::to_string(i));
            }
            if (i > 0 && !(times_[i] > times_[i - 1])) {
                throw std::invalid_argument("EventSeries: event times must be strictly increasing (index " +
                                            std::to_string(i) + ")");
            }
        }
        if (sample_begin_ > 0 && !(times_[sample_begin_ - 1] < 0.0)) {
            throw std::invalid_argument("EventSeries: pre-sample events must lie before time 0");
        }
        for (std::size_t i = sample_begin_; i < times_.size(); ++i) {
            if (times_[i] < 0.0 || times_[i] > horizon_) {
                throw std::invalid_argument("EventSeries: sample events must lie in [0, horizon]");
            }
        }
    }

    std::vector<double> times_;
    std::size_t sample_begin_ = 0;
    double horizon_;
};

}  // namespace hawkesboot
