#pragma once

// Independent reference implementations used only by the tests. They stay
// deliberately naive (direct sums, adaptive quadrature, bisection) so the
// library's recursions and closed forms are checked against something that
// cannot share their bugs.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hawkesboot/event_series.hpp"
#include "hawkesboot/intensity.hpp"

namespace hbtest {

// lambda(t) by direct summation over the full history, strict t_j < t.
inline double naive_intensity(const hawkesboot::Params& p, std::span<const double> history, double t) {
    double acc = p.mu;
    for (double h : history) {
        if (h < t) {
            acc += hawkesboot::kernel_value(p.kernel, t - h);
        }
    }
    return acc;
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 40) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fhi, double fmid, double whole, double eps,
            int level) -> double {
        const double mid = 0.5 * (lo + hi);
        const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
        const double flm = f(lmid), frm = f(rmid);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (level <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
            return left + right + (left + right - whole) / 15.0;
        }
        return rec(lo, mid, flo, fmid, flm, left, 0.5 * eps, level - 1) +
               rec(mid, hi, fmid, fhi, frm, right, 0.5 * eps, level - 1);
    };
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    return rec(a, b, fa, fb, fc, whole, tol, depth);
}

// Integral of lambda over [0, t], integrating piecewise between events so the
// quadrature never straddles a kink.
inline double quadrature_integrated_intensity(const hawkesboot::Params& p, const hawkesboot::EventSeries& h,
                                              double t, double tol = 1e-12) {
    std::vector<double> cuts{0.0};
    for (double u : h.events()) {
        if (u > 0.0 && u < t) {
            cuts.push_back(u);
        }
    }
    cuts.push_back(t);
    double acc = 0.0;
    const auto hist = h.history();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        acc += adaptive_simpson([&](double u) { return naive_intensity(p, hist, u); }, cuts[i], cuts[i + 1], tol);
    }
    return acc;
}

// Root of a monotone increasing function by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12,
                     int iters = 200) {
    double flo = f(lo);
    if (flo > 0.0) {
        throw std::invalid_argument("bisect: f(lo) > 0");
    }
    for (int i = 0; i < iters && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Central finite-difference gradient.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double rel_step = 1e-6) {
    std::vector<double> g(x.size());
    std::vector<double> v(x.begin(), x.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double step = rel_step * (1.0 + std::abs(v[i]));
        const double keep = v[i];
        v[i] = keep + step;
        const double hi = f(v);
        v[i] = keep - step;
        const double lo = f(v);
        v[i] = keep;
        g[i] = (hi - lo) / (2.0 * step);
    }
    return g;
}

}  // namespace hbtest
