#pragma once

#include <cstdint>
#include <vector>

#include "saddleperm/saddlepoint.hpp"

namespace saddleperm {

// One direction on the unit sphere, the radius r at which the conditional
// statistic reaches the level lambda along x1 = r V0^{1/2} s, the joint
// saddlepoint there, and the integrand value delta(u, s).
struct DirectionSolve {
    Vec s;
    double r = 0.0;
    Saddlepoint sp;
    double delta = 0.0;
};

// Tail evaluation at one level lambda.
struct TailResult {
    double u = 0.0;       // sqrt(2 lambda)
    double lambda = 0.0;
    double G = 1.0;       // sphere-integral estimate
    double G_se = 0.0;    // Monte Carlo standard error of G
    double u_star = 0.0;
    double p_lr = 1.0;
    double p_bn = 1.0;
    double p_chisq = 1.0;
    long M = 0;           // sphere sample count actually used
    std::uint64_t seed = 0;
    bool p_lr_clamped = false;
};

struct TailOptions {
    long sphere_samples = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
};

// Find r > 0 with Lambda(x0, r V0^{1/2} s) - Lambda_0(x0) = lambda by bracket
// expansion (doubling from 1/N) followed by bisection to |g| <= 1e-12. Lambda
// is nondecreasing along the ray, so the root is unique. Throws
// LevelUnreachable when the ray leaves the feasible region below the level.
DirectionSolve radial_root(const TiltingModel& model, const ConditionalContext& ctx,
                           const Vec& s, double lambda);

// delta(u, s) = Gamma(d1/2) |V_tau0|^{1/2} |V_tau|^{-1/2} |V0|^{1/2} r^{d1-1}
//               / (2 pi^{d1/2} u^{d1-2} |s^T V0^{1/2} tau_hat_1|),
// evaluated in log space. Throws DegenerateDirection when the inner product
// underflows.
double delta(const ConditionalContext& ctx, const DirectionSolve& dsolve, double u);

// Monte Carlo estimate of G(u) = integral of delta(u, s) over the unit sphere:
//   G_hat = (2 pi^{d1/2} / Gamma(d1/2)) * mean_l delta(u, U_l)
// with U_l i.i.d. uniform directions from per-direction streams derived from
// (seed, l). For d1 == 1 the sphere is {-1, +1} and the two-point sum is
// exact, independent of M and seed. Any failed direction aborts the estimate.
struct GEstimate {
    double G = 1.0;
    double se = 0.0;
    std::vector<DirectionSolve> solves;
};
GEstimate estimate_G(const TiltingModel& model, const ConditionalContext& ctx,
                     double lambda, long M, std::uint64_t seed, int workers = 1);

// Lugannani-Rice-type tail:
//   p = Qbar_d1(N u^2) + (c_N / N) u^{d1} e^{-N u^2 / 2} (G - 1) / u^2,
// c_N = N^{d1/2} / (2^{d1/2 - 1} Gamma(d1/2)); clamped to [0, 1].
double lr_tail(long N, int d1, double u, double G, bool* clamped = nullptr);

// Barndorff-Nielsen-type tail: u* = u - log(G)/(N u); p = Qbar_d1(N u*^2).
// Throws NonpositiveG when G <= 0.
double bn_tail(long N, int d1, double u, double G);

// Full tail evaluation at a level lambda >= 0: G estimate plus the LR, BN and
// chi-square probabilities. lambda <= 0 short-circuits to p = 1 (the event is
// the whole space).
TailResult tail_probabilities(const TiltingModel& model, const ConditionalContext& ctx,
                              double lambda, const TailOptions& options);

}  // namespace saddleperm
