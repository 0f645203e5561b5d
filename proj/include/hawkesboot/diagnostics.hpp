#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hawkesboot/stats.hpp"
#include "hawkesboot/timechange.hpp"

namespace hawkesboot {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sided Kolmogorov-Smirnov test of the values against the unit
/// exponential distribution. The p-value uses the Kolmogorov series with
/// Stephens' finite-sample correction, appropriate for the few-hundred-event
/// samples these diagnostics typically see.
inline KsResult ks_exp1(std::span<const double> values) {
    if (values.size() < 2) {
        throw std::invalid_argument("ks_exp1: need at least two values");
    }
    std::vector<double> xs(values.begin(), values.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = -std::expm1(-xs[i]);
        const double hi = static_cast<double>(i + 1) / n - cdf;
        const double lo = cdf - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_exp1(const TransformedWaits& waits) {
    return ks_exp1(waits.values);
}

/// QQ pairs (empirical quantile, unit-exponential theoretical quantile) with
/// Hazen plotting positions (i - 0.5) / n.
inline std::vector<std::pair<double, double>> qq_pairs(std::span<const double> values) {
    std::vector<double> xs(values.begin(), values.end());
    std::sort(xs.begin(), xs.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(xs.size());
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        out.emplace_back(xs[i], -std::log(1.0 - p));
    }
    return out;
}

struct AcfResult {
    std::vector<double> values;  // lags 0..max_lag
    double band = 0.0;           // +-1.96 / sqrt(n)
};

/// Sample autocorrelation function normalized by the lag-0 autocovariance.
inline AcfResult acf(std::span<const double> values, int max_lag) {
    const auto n = static_cast<int>(values.size());
    if (max_lag < 0 || max_lag >= n) {
        throw std::invalid_argument("acf: need 0 <= max_lag < n");
    }
    const double m = mean(values);
    double c0 = 0.0;
    for (double x : values) c0 += (x - m) * (x - m);
    if (!(c0 > 1e-24 * static_cast<double>(n) * (1.0 + m * m))) {
        throw std::domain_error("acf: autocorrelation undefined for a constant series");
    }
    AcfResult out;
    out.band = 1.96 / std::sqrt(static_cast<double>(n));
    out.values.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double ck = 0.0;
        for (int t = 0; t + k < n; ++t) {
            ck += (values[static_cast<std::size_t>(t)] - m) * (values[static_cast<std::size_t>(t + k)] - m);
        }
        out.values.push_back(ck / c0);
    }
    return out;
}

}  // namespace hawkesboot
