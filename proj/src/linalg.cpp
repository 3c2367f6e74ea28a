#include "saddleperm/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "saddleperm/errors.hpp"

namespace saddleperm {

Vec SymMatrix::mul(const Vec& x) const {
    assert(static_cast<int>(x.size()) == dim_);
    Vec y(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

SymMatrix SymMatrix::block(int lo, int size) const {
    assert(lo >= 0 && lo + size <= dim_);
    SymMatrix b(size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j <= i; ++j) b.set(i, j, (*this)(lo + i, lo + j));
    return b;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m = std::max(m, std::fabs((*this)(i, j)));
    return m;
}

bool cholesky_into(const SymMatrix& A, Matrix& L) noexcept {
    const int n = A.dim();
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, A(i, i));
    const double tol = 1e-12 * max_diag;

    if (L.rows() != n || L.cols() != n)
        L.resize_zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= tol) return false;
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return true;
}

void cholesky_solve(const Matrix& L, const Vec& b, Vec& x) {
    const int n = L.rows();
    if (&x != &b) x = b;
    for (int i = 0; i < n; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= L(i, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / L(i, i);
    }
}

Matrix cholesky(const SymMatrix& A) {
    Matrix L(A.dim(), A.dim());
    if (!cholesky_into(A, L))
        throw NotPositiveDefinite("cholesky: pivot below tolerance");
    return L;
}

double logdet(const SymMatrix& A) {
    const Matrix L = cholesky(A);
    double s = 0.0;
    for (int i = 0; i < A.dim(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

Vec solve_spd(const SymMatrix& A, const Vec& b) {
    const Matrix L = cholesky(A);
    Vec x(b);
    cholesky_solve(L, b, x);
    return x;
}

SymMatrix inverse_spd(const SymMatrix& A) {
    const int n = A.dim();
    SymMatrix inv(n);
    Vec e(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        const Vec col = solve_spd(A, e);
        e[j] = 0.0;
        for (int i = 0; i <= j; ++i) inv.set(i, j, col[i]);
    }
    return inv;
}

SymEigen eigen_sym(const SymMatrix& A) {
    const int n = A.dim();
    // Work on a full copy; V accumulates the rotations.
    Matrix a(n, n), v(n, n);
    for (int i = 0; i < n; ++i) {
        v(i, i) = 1.0;
        for (int j = 0; j < n; ++j) a(i, j) = A(i, j);
    }

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += a(i, i) * a(i, i);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    SymEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = v;
    return out;
}

SymMatrix sym_sqrt(const SymMatrix& A) {
    const SymEigen eig = eigen_sym(A);
    const int n = A.dim();
    const double max_eig = *std::max_element(eig.values.begin(), eig.values.end());
    for (double lambda : eig.values)
        if (lambda <= 1e-12 * max_eig)
            throw NotPositiveDefinite("sym_sqrt: eigenvalue below tolerance");

    SymMatrix b(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += eig.vectors(i, k) * std::sqrt(eig.values[k]) * eig.vectors(j, k);
            b.set(i, j, s);
        }
    }
    return b;
}

double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

}  // namespace saddleperm
