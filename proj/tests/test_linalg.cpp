#include <doctest.h>

#include <cmath>

#include "saddleperm/errors.hpp"
#include "saddleperm/linalg.hpp"
#include "saddleperm/rng.hpp"

using namespace saddleperm;

namespace {

SymMatrix random_spd(int dim, Rng& rng) {
    // B B^T + dim * I is comfortably positive definite.
    Matrix b(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) b(i, j) = rng.next_normal();
    SymMatrix a(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = i == j ? static_cast<double>(dim) : 0.0;
            for (int k = 0; k < dim; ++k) s += b(i, k) * b(j, k);
            a.set(i, j, s);
        }
    return a;
}

// Determinant by cofactor expansion; the independent oracle for logdet.
double det_cofactor(const SymMatrix& a, std::vector<int> cols) {
    const int row = a.dim() - static_cast<int>(cols.size());
    if (cols.size() == 1) return a(row, cols[0]);
    double det = 0.0;
    double sign = 1.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::vector<int> rest;
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (t != c) rest.push_back(cols[t]);
        det += sign * a(row, cols[c]) * det_cofactor(a, rest);
        sign = -sign;
    }
    return det;
}

double det_cofactor(const SymMatrix& a) {
    std::vector<int> cols(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) cols[static_cast<std::size_t>(i)] = i;
    return det_cofactor(a, cols);
}

}  // namespace

TEST_CASE("cholesky of diagonal matrices") {
    SymMatrix eye = SymMatrix::identity(4);
    Matrix l = cholesky(eye);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(l(i, j) == (i == j ? 1.0 : 0.0));

    SymMatrix d(2);
    d.set(0, 0, 4.0);
    d.set(1, 1, 9.0);
    Matrix ld = cholesky(d);
    CHECK(ld(0, 0) == 2.0);
    CHECK(ld(1, 1) == 3.0);
    CHECK(ld(1, 0) == 0.0);
}

TEST_CASE("cholesky reconstructs random SPD matrices") {
    Rng rng(11);
    for (int dim = 1; dim <= 8; ++dim) {
        for (int rep = 0; rep < 20; ++rep) {
            const SymMatrix a = random_spd(dim, rng);
            const Matrix l = cholesky(a);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j <= i; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < dim; ++k) s += l(i, k) * l(j, k);
                    CHECK(std::fabs(s - a(i, j)) <= 1e-12 * a.max_abs());
                }
        }
    }
}

TEST_CASE("cholesky rejects non-SPD input") {
    SymMatrix a(2);
    a.set(0, 0, 1.0);
    a.set(1, 1, 1.0);
    a.set(0, 1, 2.0);
    CHECK_THROWS_AS(cholesky(a), NotPositiveDefinite);
}

TEST_CASE("logdet agrees with cofactor expansion") {
    CHECK(logdet(SymMatrix::identity(5)) == 0.0);

    SymMatrix d(2);
    d.set(0, 0, 4.0);
    d.set(1, 1, 9.0);
    CHECK(std::fabs(logdet(d) - std::log(36.0)) <= 1e-14);

    Rng rng(12);
    for (int dim = 1; dim <= 4; ++dim) {
        for (int rep = 0; rep < 25; ++rep) {
            const SymMatrix a = random_spd(dim, rng);
            const double oracle = std::log(det_cofactor(a));
            CHECK(std::fabs(logdet(a) - oracle) <= 1e-10 * std::fabs(oracle) + 1e-12);
        }
    }
}

TEST_CASE("exp(logdet) equals the squared product of cholesky pivots") {
    Rng rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        const SymMatrix a = random_spd(1 + static_cast<int>(rng.below(6)), rng);
        const Matrix l = cholesky(a);
        double prod = 1.0;
        for (int i = 0; i < a.dim(); ++i) prod *= l(i, i);
        CHECK(std::exp(logdet(a)) == doctest::Approx(prod * prod).epsilon(1e-12));
    }
}

TEST_CASE("sym_sqrt squares back to the input") {
    const SymMatrix eye = SymMatrix::identity(3);
    const SymMatrix r = sym_sqrt(eye);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::fabs(r(i, j) - eye(i, j)) <= 1e-14);

    SymMatrix d(2);
    d.set(0, 0, 4.0);
    d.set(1, 1, 9.0);
    const SymMatrix rd = sym_sqrt(d);
    CHECK(std::fabs(rd(0, 0) - 2.0) <= 1e-12);
    CHECK(std::fabs(rd(1, 1) - 3.0) <= 1e-12);
    CHECK(std::fabs(rd(0, 1)) <= 1e-12);

    // pq * I with p = q = 1/2: the two-sample V0 at equal sizes.
    SymMatrix v0(3);
    for (int i = 0; i < 3; ++i) v0.set(i, i, 0.25);
    const SymMatrix rv = sym_sqrt(v0);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(rv(i, i) - 0.5) <= 1e-12);

    Rng rng(14);
    for (int dim = 1; dim <= 6; ++dim) {
        for (int rep = 0; rep < 20; ++rep) {
            const SymMatrix a = random_spd(dim, rng);
            const SymMatrix b = sym_sqrt(a);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < dim; ++k) s += b(i, k) * b(k, j);
                    CHECK(std::fabs(s - a(i, j)) <= 1e-10 * a.max_abs());
                }
        }
    }
}

TEST_CASE("sym_sqrt rejects indefinite input") {
    SymMatrix a(2);
    a.set(0, 0, 1.0);
    a.set(1, 1, -1.0);
    CHECK_THROWS_AS(sym_sqrt(a), NotPositiveDefinite);
}

TEST_CASE("solve_spd and inverse_spd") {
    Rng rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = 1 + static_cast<int>(rng.below(6));
        const SymMatrix a = random_spd(dim, rng);
        Vec b(static_cast<std::size_t>(dim));
        for (double& x : b) x = rng.next_normal();

        const Vec x = solve_spd(a, b);
        const Vec ax = a.mul(x);
        for (int i = 0; i < dim; ++i) CHECK(std::fabs(ax[i] - b[i]) <= 1e-10);

        const SymMatrix inv = inverse_spd(a);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k) s += inv(i, k) * a(k, j);
                CHECK(std::fabs(s - (i == j ? 1.0 : 0.0)) <= 1e-10);
            }
    }
}
