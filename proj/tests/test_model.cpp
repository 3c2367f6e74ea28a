#include <doctest.h>

#include <cmath>

#include "saddleperm/errors.hpp"
#include "saddleperm/model.hpp"
#include "saddleperm/rng.hpp"

using namespace saddleperm;

namespace {

TiltingModel table1_model() {
    Vec ranks(20);
    for (int i = 0; i < 20; ++i) ranks[i] = i + 1.0;
    return TiltingModel::ksample(standardize_scalar(ranks), GroupDesign({5, 5, 5, 5}));
}

TiltingModel small_two_sample(int n_per_group, int l, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> raw(static_cast<std::size_t>(2 * n_per_group),
                         Vec(static_cast<std::size_t>(l)));
    for (auto& row : raw)
        for (double& v : row) v = rng.next_normal();
    return TiltingModel::two_sample(whiten_multivariate(raw),
                                    GroupDesign({n_per_group, n_per_group}));
}

Vec random_tau(int dim, double radius, Rng& rng) {
    Vec tau(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    for (double& t : tau) {
        t = rng.next_normal();
        norm_sq += t * t;
    }
    const double scale = radius * rng.next_double() / std::sqrt(norm_sq);
    for (double& t : tau) t *= scale;
    return tau;
}

}  // namespace

TEST_CASE("kappa at zero tilt") {
    for (const TiltingModel& model : {table1_model(), small_two_sample(10, 3, 31)}) {
        const CgfValue v = cgf(model, Vec(static_cast<std::size_t>(model.dim()), 0.0));
        CHECK(std::fabs(v.kappa) <= 1e-14);
        const Vec p = model.lattice_mean();
        for (int i = 0; i < model.d0(); ++i)
            CHECK(std::fabs(v.grad[static_cast<std::size_t>(i)] -
                            p[static_cast<std::size_t>(i)]) <= 1e-12);
        for (int i = model.d0(); i < model.dim(); ++i)
            CHECK(std::fabs(v.grad[static_cast<std::size_t>(i)]) <= 1e-12);
    }
}

TEST_CASE("two-sample Hessian at zero is pq blockdiag(1, I)") {
    const TiltingModel model = small_two_sample(12, 3, 32);
    const double p = model.design().proportion(0);
    const double pq = p * (1.0 - p);
    const CgfValue v = cgf(model, Vec(4, 0.0));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::fabs(v.hess(i, j) - (i == j ? pq : 0.0)) <= 1e-10);
}

TEST_CASE("k-sample Hessian at zero is blockdiag(P, P)") {
    const TiltingModel model = table1_model();
    const int kk = model.d0();
    const CgfValue v = cgf(model, Vec(static_cast<std::size_t>(2 * kk), 0.0));
    for (int i = 0; i < kk; ++i)
        for (int j = 0; j < kk; ++j) {
            const double pij = model.design().proportion(i) *
                               ((i == j ? 1.0 : 0.0) - model.design().proportion(j));
            CHECK(std::fabs(v.hess(i, j) - pij) <= 1e-12);
            CHECK(std::fabs(v.hess(kk + i, kk + j) - pij) <= 1e-10);
            CHECK(std::fabs(v.hess(i, kk + j)) <= 1e-10);
        }
}

TEST_CASE("gradient and Hessian match finite differences") {
    Rng rng(33);
    for (const TiltingModel& model : {table1_model(), small_two_sample(10, 2, 34)}) {
        const int dim = model.dim();
        for (int rep = 0; rep < 20; ++rep) {
            const Vec tau = random_tau(dim, 1.0, rng);
            const CgfValue v = cgf(model, tau);
            const double h = 1e-5;
            for (int i = 0; i < dim; ++i) {
                Vec up(tau), dn(tau);
                up[static_cast<std::size_t>(i)] += h;
                dn[static_cast<std::size_t>(i)] -= h;
                const CgfValue vu = cgf(model, up);
                const CgfValue vd = cgf(model, dn);
                CHECK(std::fabs((vu.kappa - vd.kappa) / (2.0 * h) -
                                v.grad[static_cast<std::size_t>(i)]) <= 1e-6);
                for (int j = 0; j < dim; ++j)
                    CHECK(std::fabs((vu.grad[static_cast<std::size_t>(j)] -
                                     vd.grad[static_cast<std::size_t>(j)]) /
                                        (2.0 * h) -
                                    v.hess(i, j)) <= 1e-4);
            }
        }
    }
}

TEST_CASE("Hessian stays positive definite for moderate tilts") {
    Rng rng(35);
    for (const TiltingModel& model : {table1_model(), small_two_sample(10, 3, 36)}) {
        for (int rep = 0; rep < 50; ++rep) {
            const Vec tau = random_tau(model.dim(), 5.0, rng);
            CHECK_NOTHROW(cholesky(cgf(model, tau).hess));
        }
    }
}

TEST_CASE("kappa is convex") {
    Rng rng(37);
    for (const TiltingModel& model : {table1_model(), small_two_sample(8, 2, 38)}) {
        for (int rep = 0; rep < 50; ++rep) {
            const Vec a = random_tau(model.dim(), 2.0, rng);
            const Vec b = random_tau(model.dim(), 2.0, rng);
            Vec mid(a);
            for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
            CHECK(cgf(model, mid).kappa <=
                  0.5 * (cgf(model, a).kappa + cgf(model, b).kappa) + 1e-12);
        }
    }
}

TEST_CASE("lattice restriction agrees with the full kappa") {
    Rng rng(39);
    for (const TiltingModel& model : {table1_model(), small_two_sample(10, 3, 40)}) {
        for (int rep = 0; rep < 30; ++rep) {
            const Vec tau0 = random_tau(model.d0(), 2.0, rng);
            Vec tau(tau0);
            tau.resize(static_cast<std::size_t>(model.dim()), 0.0);
            const CgfValue full = cgf(model, tau);
            const CgfValue lat = cgf_lattice(model, tau0);
            CHECK(std::fabs(full.kappa - lat.kappa) <= 1e-14);
            for (int i = 0; i < model.d0(); ++i) {
                CHECK(std::fabs(full.grad[static_cast<std::size_t>(i)] -
                                lat.grad[static_cast<std::size_t>(i)]) <= 1e-13);
                for (int j = 0; j <= i; ++j)
                    CHECK(std::fabs(full.hess(i, j) - lat.hess(i, j)) <= 1e-13);
            }
        }
    }
}

TEST_CASE("lattice kappa at zero") {
    const TiltingModel ks = table1_model();
    const CgfValue v = cgf_lattice(ks, Vec(3, 0.0));
    CHECK(std::fabs(v.kappa) <= 1e-15);
    for (int i = 0; i < 3; ++i) {
        CHECK(v.grad[static_cast<std::size_t>(i)] ==
              doctest::Approx(0.25).epsilon(1e-14));
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(v.hess(i, j) - (i == j ? 0.25 * 0.75 : -0.25 * 0.25)) <=
                  1e-14);
    }

    const TiltingModel ts = small_two_sample(10, 2, 41);
    const CgfValue w = cgf_lattice(ts, Vec(1, 0.0));
    CHECK(std::fabs(w.kappa) <= 1e-15);
    CHECK(w.grad[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w.hess(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("permuting group labels with equal sizes permutes kappa's arguments") {
    const TiltingModel model = table1_model();
    Rng rng(42);
    // Swap groups 1 and 2 (both size 5): kappa is invariant when the tau
    // components are swapped the same way.
    for (int rep = 0; rep < 20; ++rep) {
        const Vec tau = random_tau(6, 2.0, rng);
        Vec swapped(tau);
        std::swap(swapped[0], swapped[1]);
        std::swap(swapped[3], swapped[4]);
        CHECK(std::fabs(cgf(model, tau).kappa - cgf(model, swapped).kappa) <= 1e-14);
    }
}

TEST_CASE("overflow guard trips on huge tilts") {
    const TiltingModel model = table1_model();
    Vec tau(6, 0.0);
    tau[3] = 900.0;
    CHECK_THROWS_AS(cgf(model, tau), OverflowGuard);
}
