#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hawkesboot {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal quantile by bisection on the CDF.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    }
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Regularized lower incomplete gamma P(a,x); series for x < a+1, continued
// fraction otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        throw std::invalid_argument("gamma_p: bad arguments");
    }
    if (x == 0.0) {
        return 0.0;
    }
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) {
                break;
            }
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a,x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            break;
        }
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace detail

inline double chi2_cdf(double x, int dof) {
    if (dof < 1) {
        throw std::invalid_argument("chi2_cdf: dof must be >= 1");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return detail::gamma_p(0.5 * dof, 0.5 * x);
}

inline double chi2_quantile(double p, int dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi2_quantile: p must be in (0,1)");
    }
    double hi = 1.0;
    while (chi2_cdf(hi, dof) < p) {
        hi *= 2.0;
        if (hi > 1e8) break;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Kolmogorov limiting tail Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_q(double x) {
    if (x <= 0.0) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct TwoSampleKs {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TwoSampleKs two_sample_ks(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) {
        throw std::invalid_argument("two_sample_ks: empty sample");
    }
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

/// Order-statistic quantile: the ceil(q*n)-th smallest value (1-based).
inline double quantile_order_stat(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile_order_stat: empty input");
    }
    const double n = static_cast<double>(sorted.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mean: empty input");
    }
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace hawkesboot
