#include "saddleperm/saddlepoint.hpp"

#include <cmath>
#include <string>

#include "saddleperm/errors.hpp"

namespace saddleperm {

namespace {

constexpr double kResidualTol = 1e-11;
constexpr int kMaxIterations = 200;
constexpr int kMaxHalvings = 60;

}  // namespace

SaddleSolver::SaddleSolver(const TiltingModel& model)
    : model_(&model), tau_(static_cast<std::size_t>(model.dim()), 0.0),
      f_(static_cast<std::size_t>(model.dim())),
      step_(static_cast<std::size_t>(model.dim())),
      trial_(static_cast<std::size_t>(model.dim())) {}

void SaddleSolver::reset() {
    std::fill(tau_.begin(), tau_.end(), 0.0);
}

void SaddleSolver::warm_start(const Vec& tau) {
    if (tau.size() != tau_.size())
        throw DomainError("SaddleSolver: warm start has wrong dimension");
    tau_ = tau;
}

void SaddleSolver::run_newton(const Vec& target) {
    const int dim = model_->dim();
    if (static_cast<int>(target.size()) != dim)
        throw DomainError("solve_saddlepoint: target has wrong dimension");

    cgf_into(*model_, tau_, val_);
    auto residual_of = [&](const CgfValue& v) {
        for (int i = 0; i < dim; ++i)
            f_[static_cast<std::size_t>(i)] =
                v.grad[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
        return norm_inf(f_);
    };
    double res = residual_of(val_);

    int it = 0;
    while (res > kResidualTol) {
        if (++it > kMaxIterations)
            throw NoConvergence("saddlepoint Newton: iteration limit, residual " +
                                std::to_string(res));

        // The tilted covariance collapses as the tilt diverges toward the
        // mean-domain boundary; a failed factorization is that signal.
        if (!cholesky_into(val_.hess, chol_))
            throw NoConvergence("saddlepoint Newton: singular Hessian at residual " +
                                std::to_string(res));
        for (int i = 0; i < dim; ++i)
            step_[static_cast<std::size_t>(i)] = -f_[static_cast<std::size_t>(i)];
        cholesky_solve(chol_, step_, step_);

        // Backtrack by halving until the residual decreases.
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            for (int i = 0; i < dim; ++i)
                trial_[static_cast<std::size_t>(i)] =
                    tau_[static_cast<std::size_t>(i)] +
                    alpha * step_[static_cast<std::size_t>(i)];
            try {
                cgf_into(*model_, trial_, trial_val_);
                const double tr = residual_of(trial_val_);
                if (tr < res) {
                    std::swap(tau_, trial_);
                    std::swap(val_, trial_val_);
                    res = tr;
                    accepted = true;
                    break;
                }
            } catch (const OverflowGuard&) {
                // step left the representable tilt range; shorten it
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw NoConvergence("saddlepoint Newton: line search stalled at residual " +
                                std::to_string(res));
    }

    iterations_ = it;
    residual_ = res;
}

double SaddleSolver::solve_lambda(const Vec& target) {
    try {
        run_newton(target);
    } catch (...) {
        // A failed solve leaves tau_ wherever Newton stopped; restart clean.
        reset();
        throw;
    }
    return dot(tau_, target) - val_.kappa;
}

Saddlepoint SaddleSolver::solve(const Vec& target) {
    const double lambda = solve_lambda(target);
    Saddlepoint sp;
    sp.tau_hat = tau_;
    sp.lambda = lambda;
    sp.hess = val_.hess;
    sp.target = target;
    sp.iterations = iterations_;
    sp.residual = residual_;
    return sp;
}

Saddlepoint solve_saddlepoint(const TiltingModel& model, const Vec& target,
                              const Vec* warm_start) {
    SaddleSolver solver(model);
    if (warm_start != nullptr) solver.warm_start(*warm_start);
    return solver.solve(target);
}

Saddlepoint solve_lattice(const TiltingModel& model, const Vec& x0,
                          const Vec* warm_start) {
    if (static_cast<int>(x0.size()) != model.d0())
        throw DomainError("solve_lattice: x0 has wrong dimension");

    // Lattice solves happen once per context; a simple damped Newton on the
    // closed-form kappa_0 suffices.
    const int dim = model.d0();
    Vec tau(static_cast<std::size_t>(dim), 0.0);
    if (warm_start != nullptr) tau = *warm_start;

    CgfValue val = cgf_lattice(model, tau);
    Vec f(static_cast<std::size_t>(dim));
    auto residual_of = [&](const CgfValue& v) {
        for (int i = 0; i < dim; ++i)
            f[static_cast<std::size_t>(i)] =
                v.grad[static_cast<std::size_t>(i)] - x0[static_cast<std::size_t>(i)];
        return norm_inf(f);
    };
    double res = residual_of(val);

    int it = 0;
    while (res > kResidualTol) {
        if (++it > kMaxIterations)
            throw NoConvergence("lattice Newton: iteration limit, residual " +
                                std::to_string(res));
        Vec step(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            step[static_cast<std::size_t>(i)] = -f[static_cast<std::size_t>(i)];
        Matrix chol;
        if (!cholesky_into(val.hess, chol))
            throw NoConvergence("lattice Newton: singular Hessian at residual " +
                                std::to_string(res));
        cholesky_solve(chol, step, step);

        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            Vec trial(tau);
            for (int i = 0; i < dim; ++i)
                trial[static_cast<std::size_t>(i)] += alpha * step[static_cast<std::size_t>(i)];
            try {
                CgfValue tv = cgf_lattice(model, trial);
                const double tr = residual_of(tv);
                if (tr < res) {
                    tau = std::move(trial);
                    val = std::move(tv);
                    res = tr;
                    accepted = true;
                    break;
                }
            } catch (const OverflowGuard&) {
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw NoConvergence("lattice Newton: line search stalled at residual " +
                                std::to_string(res));
    }

    Saddlepoint sp;
    sp.tau_hat = std::move(tau);
    sp.lambda = dot(sp.tau_hat, x0) - val.kappa;
    sp.hess = std::move(val.hess);
    sp.target = x0;
    sp.iterations = it;
    sp.residual = res;
    return sp;
}

ConditionalContext conditional_context(const TiltingModel& model, const Vec& x0) {
    ConditionalContext ctx;
    ctx.x0 = x0;
    ctx.sp0 = solve_lattice(model, x0);
    ctx.logdet_V_tau0 = logdet(ctx.sp0.hess);

    const SymMatrix hess0 = cgf(model, Vec(static_cast<std::size_t>(model.dim()), 0.0)).hess;
    const SymMatrix inv = inverse_spd(hess0);
    ctx.V0 = inverse_spd(inv.block(model.d0(), model.d1()));
    ctx.V0_sqrt = sym_sqrt(ctx.V0);
    ctx.logdet_V0 = logdet(ctx.V0);
    return ctx;
}

double conditional_density(const TiltingModel& model, const ConditionalContext& ctx,
                           const Vec& x1) {
    const int d1 = model.d1();
    Vec target(ctx.x0);
    target.insert(target.end(), x1.begin(), x1.end());
    const Saddlepoint sp = solve_saddlepoint(model, target);

    const double n = static_cast<double>(model.population());
    const double two_pi = 6.283185307179586476925286766559;
    const double log_r = 0.5 * ctx.logdet_V_tau0 - n * (sp.lambda - ctx.sp0.lambda) -
                         0.5 * d1 * std::log(two_pi / n) - 0.5 * logdet(sp.hess);
    return std::exp(log_r);
}

}  // namespace saddleperm
