#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hawkesboot {

enum class KernelFamily { Exponential, PowerLaw };

/// Excitation kernel gamma(x) of a self-exciting process.
///
/// Exponential: gamma(x) = alpha * exp(-beta x).
/// Power law:   gamma(x) = alpha * (x + beta)^(-delta).
///
/// Parameters are validated at construction, so any Kernel instance is usable
/// downstream without further checks.
class Kernel {
public:
    static Kernel exponential(double alpha, double beta) {
        return Kernel(KernelFamily::Exponential, alpha, beta, 0.0);
    }

    static Kernel power_law(double alpha, double beta, double delta) {
        if (!(std::isfinite(delta) && delta > 0.0)) {
            throw std::invalid_argument("Kernel: power-law delta must be finite and > 0");
        }
        return Kernel(KernelFamily::PowerLaw, alpha, beta, delta);
    }

    [[nodiscard]] KernelFamily family() const { return family_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] double delta() const { return delta_; }

private:
    Kernel(KernelFamily family, double alpha, double beta, double delta)
        : family_(family), alpha_(alpha), beta_(beta), delta_(delta) {
        if (!(std::isfinite(alpha) && alpha >= 0.0)) {
            throw std::invalid_argument("Kernel: alpha must be finite and >= 0");
        }
        if (!(std::isfinite(beta) && beta > 0.0)) {
            throw std::invalid_argument("Kernel: beta must be finite and > 0");
        }
    }

    KernelFamily family_;
    double alpha_;
    double beta_;
    double delta_;
};

/// gamma(x) for elapsed time x >= 0.
inline double kernel_value(const Kernel& k, double x) {
    if (!(x >= 0.0)) {
        throw std::domain_error("kernel_value: elapsed time must be >= 0");
    }
    switch (k.family()) {
        case KernelFamily::Exponential:
            return k.alpha() * std::exp(-k.beta() * x);
        case KernelFamily::PowerLaw:
            return k.alpha() * std::pow(x + k.beta(), -k.delta());
    }
    return 0.0;
}

/// Exact integral of gamma over [0, x]. Accepts x = +infinity.
inline double kernel_integral(const Kernel& k, double x) {
    if (!(x >= 0.0)) {
        throw std::domain_error("kernel_integral: elapsed time must be >= 0");
    }
    switch (k.family()) {
        case KernelFamily::Exponential:
            if (std::isinf(x)) {
                return k.alpha() / k.beta();
            }
            return -(k.alpha() / k.beta()) * std::expm1(-k.beta() * x);
        case KernelFamily::PowerLaw: {
            const double d = k.delta();
            // Near d = 1 the generic branch cancels catastrophically; use the
            // logarithmic antiderivative there.
            if (std::abs(d - 1.0) <= 1e-8) {
                if (std::isinf(x)) {
                    return std::numeric_limits<double>::infinity();
                }
                return k.alpha() * (std::log(x + k.beta()) - std::log(k.beta()));
            }
            if (std::isinf(x)) {
                return d > 1.0 ? k.alpha() * std::pow(k.beta(), 1.0 - d) / (d - 1.0)
                               : std::numeric_limits<double>::infinity();
            }
            return k.alpha() * (std::pow(k.beta(), 1.0 - d) - std::pow(x + k.beta(), 1.0 - d)) / (d - 1.0);
        }
    }
    return 0.0;
}

/// Total mass of the kernel, a = integral of gamma over [0, inf).
/// +infinity for a power law with delta <= 1.
inline double branching_ratio(const Kernel& k) {
    return kernel_integral(k, std::numeric_limits<double>::infinity());
}

inline std::string kernel_family_name(KernelFamily f) {
    return f == KernelFamily::Exponential ? "exponential" : "powerlaw";
}

}  // namespace hawkesboot
