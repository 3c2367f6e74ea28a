#pragma once

#include <cstddef>
#include <vector>

namespace saddleperm {

using Vec = std::vector<double>;

// Dense matrix, row major. Everything in this library is small (dim <= ~12),
// so there are no blocked or sparse paths.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

    void resize_zero(int rows, int cols) {
        rows_ = rows;
        cols_ = cols;
        a_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// Symmetric matrix; set() writes both triangles so the storage is symmetric
// exactly, bit for bit.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim)
        : dim_(dim), a_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0) {}

    static SymMatrix identity(int dim) {
        SymMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }

    void resize_zero(int dim) {
        dim_ = dim;
        a_.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
    }

    int dim() const { return dim_; }

    double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * dim_ + j];
    }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * dim_ + j] = v;
        a_[static_cast<std::size_t>(j) * dim_ + i] = v;
    }

    void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

    Vec mul(const Vec& x) const;

    // Principal sub-block rows/cols [lo, lo+size).
    SymMatrix block(int lo, int size) const;

    double max_abs() const;

private:
    int dim_ = 0;
    std::vector<double> a_;
};

// Cholesky factor L with L * L^T = A (lower triangular). Throws
// NotPositiveDefinite when a pivot falls at or below 1e-12 times the largest
// diagonal entry.
Matrix cholesky(const SymMatrix& A);

// Allocation-free variants for solver hot paths. cholesky_into returns false
// instead of throwing when A is not positive definite; L is resized as needed.
bool cholesky_into(const SymMatrix& A, Matrix& L) noexcept;
void cholesky_solve(const Matrix& L, const Vec& b, Vec& x);

// log det A via the Cholesky pivots.
double logdet(const SymMatrix& A);

// Solve A x = b for SPD A.
Vec solve_spd(const SymMatrix& A, const Vec& b);

// Inverse of SPD A (small dims only).
SymMatrix inverse_spd(const SymMatrix& A);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// A = V diag(values) V^T; columns of V are the eigenvectors.
struct SymEigen {
    Vec values;
    Matrix vectors;
};
SymEigen eigen_sym(const SymMatrix& A);

// Symmetric square root B with B * B = A. Throws NotPositiveDefinite when an
// eigenvalue falls at or below 1e-12 times the largest.
SymMatrix sym_sqrt(const SymMatrix& A);

// Small vector helpers.
double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& a);
double norm2(const Vec& a);

}  // namespace saddleperm
