#include "saddleperm/model.hpp"

#include <cmath>
#include <string>

#include "saddleperm/errors.hpp"

namespace saddleperm {

namespace {

constexpr double kMaxExponent = 700.0;

void guard_exponent(double e) {
    if (e > kMaxExponent)
        throw OverflowGuard("cgf: tilt too large (exponent " + std::to_string(e) + ")");
}

constexpr int kMaxGroups = 33;

// kappa(tau) for the k-sample model, accumulated per population element.
void cgf_ksample(const TiltingModel& model, const Vec& tau, CgfValue& out) {
    const GroupDesign& design = model.design();
    const ScoreSet& scores = model.scores();
    const int kk = model.d0();  // k - 1
    const int n = model.population();
    const double pk = design.proportion(kk);

    out.kappa = 0.0;
    out.grad.assign(static_cast<std::size_t>(2 * kk), 0.0);
    out.hess.resize_zero(2 * kk);

    double w[kMaxGroups];
    for (int m = 0; m < n; ++m) {
        const double a = scores.scalar(m);

        double mx = 0.0;  // baseline exponent is 0
        for (int i = 0; i < kk; ++i) {
            const double e = tau[static_cast<std::size_t>(i)] +
                             tau[static_cast<std::size_t>(kk + i)] * a;
            guard_exponent(e);
            w[i] = e;
            mx = std::max(mx, e);
        }
        double denom = pk * std::exp(-mx);
        for (int i = 0; i < kk; ++i) {
            w[i] = design.proportion(i) * std::exp(w[i] - mx);
            denom += w[i];
        }
        out.kappa += mx + std::log(denom);
        for (int i = 0; i < kk; ++i) w[i] /= denom;

        // Per-element covariance diag(w) - w w^T enters each of the four
        // blocks scaled by 1, a, a, a^2.
        const double a2 = a * a;
        for (int i = 0; i < kk; ++i) {
            const double wi = w[i];
            out.grad[static_cast<std::size_t>(i)] += wi;
            out.grad[static_cast<std::size_t>(kk + i)] += a * wi;
            for (int j = 0; j <= i; ++j) {
                const double c = (i == j ? wi * (1.0 - wi) : -wi * w[j]);
                out.hess.add(i, j, c);
                out.hess.add(kk + i, kk + j, a2 * c);
                out.hess.add(kk + i, j, a * c);
                if (i != j) out.hess.add(kk + j, i, a * c);
            }
        }
    }

    const double inv_n = 1.0 / n;
    out.kappa *= inv_n;
    for (double& g : out.grad) g *= inv_n;
    for (int i = 0; i < 2 * kk; ++i)
        for (int j = 0; j <= i; ++j) out.hess.set(i, j, out.hess(i, j) * inv_n);
}

void cgf_two_sample(const TiltingModel& model, const Vec& tau, CgfValue& out) {
    const ScoreSet& scores = model.scores();
    const int l = model.d1();
    const int n = model.population();
    const double p = model.design().proportion(0);
    const double q = 1.0 - p;

    out.kappa = 0.0;
    out.grad.assign(static_cast<std::size_t>(1 + l), 0.0);
    out.hess.resize_zero(1 + l);

    for (int m = 0; m < n; ++m) {
        double e = tau[0];
        for (int j = 0; j < l; ++j) e += tau[static_cast<std::size_t>(1 + j)] * scores.at(m, j);
        guard_exponent(e);

        // log(q + p e^e) and the logistic weight s, both overflow safe.
        double logterm, s;
        if (e >= 0.0) {
            const double z = q * std::exp(-e) + p;
            logterm = e + std::log(z);
            s = p / z;
        } else {
            const double z = q + p * std::exp(e);
            logterm = std::log(z);
            s = p * std::exp(e) / z;
        }
        out.kappa += logterm;

        const double v = s * (1.0 - s);
        out.grad[0] += s;
        out.hess.add(0, 0, v);
        for (int i = 0; i < l; ++i) {
            const double ai = scores.at(m, i);
            out.grad[static_cast<std::size_t>(1 + i)] += s * ai;
            out.hess.add(1 + i, 0, v * ai);
            for (int j = 0; j <= i; ++j) out.hess.add(1 + i, 1 + j, v * ai * scores.at(m, j));
        }
    }

    const double inv_n = 1.0 / n;
    out.kappa *= inv_n;
    for (double& g : out.grad) g *= inv_n;
    for (int i = 0; i < 1 + l; ++i)
        for (int j = 0; j <= i; ++j) out.hess.set(i, j, out.hess(i, j) * inv_n);
}

}  // namespace

TiltingModel TiltingModel::ksample(ScoreSet scores, GroupDesign design) {
    if (design.groups() < 2) throw DomainError("ksample model: need k >= 2 groups");
    if (design.groups() >= kMaxGroups)
        throw DomainError("ksample model: too many groups");
    if (scores.dim() != 1) throw DomainError("ksample model: scores must be scalar");
    if (scores.size() != design.total())
        throw DomainError("ksample model: score count does not match design");
    const int kk = design.groups() - 1;
    return TiltingModel(ModelKind::KSample, std::move(scores), std::move(design), kk, kk);
}

TiltingModel TiltingModel::two_sample(ScoreSet scores, GroupDesign design) {
    if (design.groups() != 2) throw DomainError("two-sample model: need exactly 2 groups");
    if (scores.size() != design.total())
        throw DomainError("two-sample model: score count does not match design");
    return TiltingModel(ModelKind::TwoSampleMV, std::move(scores), std::move(design), 1,
                        scores.dim());
}

Vec TiltingModel::lattice_mean() const {
    Vec p(static_cast<std::size_t>(d0_));
    for (int i = 0; i < d0_; ++i) p[static_cast<std::size_t>(i)] = design_.proportion(i);
    return p;
}

void cgf_into(const TiltingModel& model, const Vec& tau, CgfValue& out) {
    if (static_cast<int>(tau.size()) != model.dim())
        throw DomainError("cgf: tau has wrong dimension");
    if (model.kind() == ModelKind::KSample)
        cgf_ksample(model, tau, out);
    else
        cgf_two_sample(model, tau, out);
}

CgfValue cgf(const TiltingModel& model, const Vec& tau) {
    CgfValue out;
    cgf_into(model, tau, out);
    return out;
}

CgfValue cgf_lattice(const TiltingModel& model, const Vec& tau0) {
    if (static_cast<int>(tau0.size()) != model.d0())
        throw DomainError("cgf_lattice: tau0 has wrong dimension");

    CgfValue out;
    if (model.kind() == ModelKind::KSample) {
        const int kk = model.d0();
        const GroupDesign& design = model.design();
        double mx = 0.0;
        for (double t : tau0) {
            guard_exponent(t);
            mx = std::max(mx, t);
        }
        double denom = design.proportion(kk) * std::exp(-mx);
        Vec w(static_cast<std::size_t>(kk));
        for (int i = 0; i < kk; ++i) {
            w[static_cast<std::size_t>(i)] =
                design.proportion(i) * std::exp(tau0[static_cast<std::size_t>(i)] - mx);
            denom += w[static_cast<std::size_t>(i)];
        }
        out.kappa = mx + std::log(denom);
        out.grad.resize(static_cast<std::size_t>(kk));
        out.hess = SymMatrix(kk);
        for (int i = 0; i < kk; ++i) {
            const double wi = w[static_cast<std::size_t>(i)] / denom;
            out.grad[static_cast<std::size_t>(i)] = wi;
            for (int j = 0; j <= i; ++j)
                out.hess.set(i, j,
                             i == j ? wi * (1.0 - wi)
                                    : -wi * w[static_cast<std::size_t>(j)] / denom);
        }
    } else {
        const double p = model.design().proportion(0);
        const double q = 1.0 - p;
        const double e = tau0[0];
        guard_exponent(e);
        double s;
        if (e >= 0.0) {
            const double z = q * std::exp(-e) + p;
            out.kappa = e + std::log(z);
            s = p / z;
        } else {
            const double z = q + p * std::exp(e);
            out.kappa = std::log(z);
            s = p * std::exp(e) / z;
        }
        out.grad = {s};
        out.hess = SymMatrix(1);
        out.hess.set(0, 0, s * (1.0 - s));
    }
    return out;
}

}  // namespace saddleperm
