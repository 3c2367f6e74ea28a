#pragma once

#include "saddleperm/model.hpp"

namespace saddleperm {

// Solution of kappa'(tau_hat) = target together with the dual value
// Lambda = tau_hat^T target - kappa(tau_hat) and the tilted covariance
// kappa''(tau_hat).
struct Saddlepoint {
    Vec tau_hat;
    double lambda = 0.0;
    SymMatrix hess;
    Vec target;
    int iterations = 0;
    double residual = 0.0;
};

// Damped Newton iteration on kappa'(tau) = target starting from tau = 0 (or
// from *warm_start when given). Converges when the residual infinity norm
// falls to 1e-11; throws NoConvergence after 200 iterations or a failed line
// search, which operationally flags targets on or outside the mean-domain
// boundary.
Saddlepoint solve_saddlepoint(const TiltingModel& model, const Vec& target,
                              const Vec* warm_start = nullptr);

// Reusable solver for repeated joint solves against one model. Buffers
// persist across calls and each solve warm-starts from the previous solution
// unless reset() intervenes; results are identical to solve_saddlepoint with
// the same starting point.
class SaddleSolver {
public:
    explicit SaddleSolver(const TiltingModel& model);

    void reset();  // next solve starts from tau = 0

    void warm_start(const Vec& tau);  // next solve starts from tau

    // Lambda = tau_hat^T target - kappa(tau_hat); no result object built.
    double solve_lambda(const Vec& target);

    Saddlepoint solve(const Vec& target);

    const Vec& tau_hat() const { return tau_; }

private:
    void run_newton(const Vec& target);

    const TiltingModel* model_;
    Vec tau_, f_, step_, trial_;
    CgfValue val_, trial_val_;
    Matrix chol_;
    int iterations_ = 0;
    double residual_ = 0.0;
};

// The same solve restricted to the lattice marginal kappa_0.
Saddlepoint solve_lattice(const TiltingModel& model, const Vec& x0,
                          const Vec* warm_start = nullptr);

// Everything the conditional tail formulas need at a fixed lattice point x0:
// the lattice saddlepoint, V0 with V0^{-1} = [kappa''(0)^{-1}]_11 (the lower
// right d1 x d1 block), its symmetric square root, and cached log
// determinants.
struct ConditionalContext {
    Vec x0;
    Saddlepoint sp0;          // lattice saddlepoint; sp0.hess is V_{tau_hat_0}
    SymMatrix V0;
    SymMatrix V0_sqrt;
    double logdet_V_tau0 = 0.0;
    double logdet_V0 = 0.0;
};

ConditionalContext conditional_context(const TiltingModel& model, const Vec& x0);

// Formal conditional saddlepoint density
//   r(x1 | x0) = |V_tau0|^{1/2} e^{-N(Lambda - Lambda_0)}
//                / ((2 pi / N)^{d1/2} |V_tau|^{1/2}),
// evaluated in log space.
double conditional_density(const TiltingModel& model, const ConditionalContext& ctx,
                           const Vec& x1);

}  // namespace saddleperm
