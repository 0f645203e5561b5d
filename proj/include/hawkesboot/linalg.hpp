#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hawkesboot {

/// Dense square matrix for the tiny (d <= 4) systems used here.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    [[nodiscard]] int size() const { return n_; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int n_ = 0;
    std::vector<double> a_;
};

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.size());
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) t(j, i) = m(i, j);
    return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const int n = a.size();
    Matrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
inline std::vector<double> symmetric_eigenvalues(Matrix m) {
    const int n = m.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-30 * (1.0 + m.max_abs() * m.max_abs())) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = m(i, i);
    return ev;
}

/// Lower Cholesky factor, or nullopt when the matrix is not positive definite.
inline std::optional<Matrix> cholesky(const Matrix& a) {
    const int n = a.size();
    Matrix l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0)) {
                    return std::nullopt;
                }
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

inline std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const int n = l.size();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / l(i, i);
    }
    return y;
}

/// Inverse of a symmetric positive definite matrix.
inline Matrix spd_inverse(const Matrix& a) {
    const auto l = cholesky(a);
    if (!l) {
        throw std::domain_error("spd_inverse: matrix is not positive definite");
    }
    const int n = a.size();
    Matrix inv(n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        const auto col = cholesky_solve(*l, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<std::size_t>(i)];
        e[static_cast<std::size_t>(j)] = 0.0;
    }
    return inv;
}

inline double quad_form(const Matrix& m, std::span<const double> v) {
    const int n = m.size();
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q += v[static_cast<std::size_t>(i)] * m(i, j) * v[static_cast<std::size_t>(j)];
    return q;
}

/// All eigenvalues below -tol_scale * max|H_ij| (the negative-definiteness
/// gate used by the post-fit sanity check).
inline bool negative_definite(const Matrix& h, double tol_scale = 1e-10) {
    const double scale = h.max_abs();
    if (scale == 0.0) {
        return false;
    }
    for (double ev : symmetric_eigenvalues(h)) {
        if (!(ev < -tol_scale * scale)) {
            return false;
        }
    }
    return true;
}

}  // namespace hawkesboot
