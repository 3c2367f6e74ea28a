#include "saddleperm/tail.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "saddleperm/errors.hpp"
#include "saddleperm/rng.hpp"
#include "saddleperm/special.hpp"

namespace saddleperm {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kLevelTol = 1e-12;
constexpr int kMaxExpansions = 70;
constexpr int kMaxBisections = 200;

std::string direction_string(const Vec& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

}  // namespace

DirectionSolve radial_root(const TiltingModel& model, const ConditionalContext& ctx,
                           const Vec& s, double lambda) {
    if (lambda <= 0.0) throw DomainError("radial_root: lambda must be positive");

    // level(r) = Lambda(x0, r V0^{1/2} s) - Lambda_0(x0) at the joint target
    // (x0, r V0^{1/2} s); the solver warm-starts along this direction only.
    const Vec dir = ctx.V0_sqrt.mul(s);
    const std::size_t d0 = ctx.x0.size();
    Vec target(static_cast<std::size_t>(model.dim()));
    std::copy(ctx.x0.begin(), ctx.x0.end(), target.begin());
    auto target_at = [&](double r) {
        for (std::size_t j = 0; j < dir.size(); ++j) target[d0 + j] = r * dir[j];
    };

    SaddleSolver solver(model);
    Vec last_good_tau(static_cast<std::size_t>(model.dim()), 0.0);
    auto level = [&](double r) {
        target_at(r);
        try {
            const double lam = solver.solve_lambda(target);
            last_good_tau = solver.tau_hat();
            return lam - ctx.sp0.lambda - lambda;
        } catch (...) {
            // leave the chain at the last feasible solution
            solver.warm_start(last_good_tau);
            throw;
        }
    };

    // Expand until the level is crossed. A probe past the feasibility
    // boundary shrinks back toward the last feasible radius: Lambda rises
    // continuously to a finite supremum there, so if that supremum exceeds
    // lambda a feasible crossing radius exists and the refinement finds it.
    // Only when every feasible probe stays below the level is it unreachable.
    double r_lo = 0.0;  // g(0) = -lambda < 0
    double r_hi = 1.0 / model.population();
    double r_infeasible = -1.0;
    double g_hi = -lambda;
    int expansions = 0;
    for (;;) {
        bool feasible = true;
        try {
            g_hi = level(r_hi);
        } catch (const Error&) {
            feasible = false;
        }
        if (feasible && g_hi >= 0.0) break;
        if (feasible) {
            r_lo = r_hi;
        } else {
            r_infeasible = r_hi;
        }
        if (r_infeasible > 0.0) {
            if (r_infeasible - r_lo <= 1e-12 * r_infeasible)
                throw LevelUnreachable(
                    "radial_root: level " + std::to_string(lambda) +
                    " exceeds the supremum along s = " + direction_string(s));
            r_hi = 0.5 * (r_lo + r_infeasible);
        } else {
            r_hi *= 2.0;
        }
        if (++expansions > kMaxExpansions + kMaxBisections)
            throw LevelUnreachable("radial_root: bracket search exhausted along s = " +
                                   direction_string(s));
    }

    DirectionSolve out;
    if (std::fabs(g_hi) <= kLevelTol) {
        out.r = r_hi;
    } else {
        double g_mid = g_hi;
        double r_mid = r_hi;
        for (int it = 0; it < kMaxBisections; ++it) {
            r_mid = 0.5 * (r_lo + r_hi);
            g_mid = level(r_mid);
            if (std::fabs(g_mid) <= kLevelTol) break;
            if (g_mid > 0.0)
                r_hi = r_mid;
            else
                r_lo = r_mid;
            if (r_hi - r_lo <= 1e-17 * r_hi) break;
        }
        if (std::fabs(g_mid) > 1e-9)
            throw NoConvergence("radial_root: bisection stalled, |g| = " +
                                std::to_string(std::fabs(g_mid)));
        out.r = r_mid;
    }

    // One full solve at the accepted radius (warm, so it converges at once).
    target_at(out.r);
    out.sp = solver.solve(target);
    out.s = s;
    return out;
}

double delta(const ConditionalContext& ctx, const DirectionSolve& dsolve, double u) {
    const int d1 = ctx.V0.dim();
    const int d0 = static_cast<int>(ctx.x0.size());

    Vec tau1(dsolve.sp.tau_hat.begin() + d0, dsolve.sp.tau_hat.end());
    const double ip = std::fabs(dot(dsolve.s, ctx.V0_sqrt.mul(tau1)));
    if (ip <= 1e-12)
        throw DegenerateDirection("delta: |s^T V0^{1/2} tau_1| underflow at s = " +
                                  direction_string(dsolve.s));

    const double log_delta = std::lgamma(0.5 * d1) + 0.5 * ctx.logdet_V_tau0 -
                             0.5 * logdet(dsolve.sp.hess) + 0.5 * ctx.logdet_V0 +
                             (d1 - 1) * std::log(dsolve.r) - std::log(2.0) -
                             0.5 * d1 * std::log(kPi) - (d1 - 2) * std::log(u) -
                             std::log(ip);
    return std::exp(log_delta);
}

GEstimate estimate_G(const TiltingModel& model, const ConditionalContext& ctx,
                     double lambda, long M, std::uint64_t seed, int workers) {
    if (M < 1) throw DomainError("estimate_G: M must be >= 1");
    if (lambda <= 0.0) throw DomainError("estimate_G: lambda must be positive");

    const int d1 = model.d1();
    const double u = std::sqrt(2.0 * lambda);

    GEstimate est;
    if (d1 == 1) {
        // The unit "sphere" is {-1, +1}; the surface-measure constant
        // 2 pi^{1/2} / Gamma(1/2) = 2 turns the estimator into the exact sum.
        for (double sign : {1.0, -1.0}) {
            DirectionSolve ds = radial_root(model, ctx, Vec{sign}, lambda);
            ds.delta = delta(ctx, ds, u);
            est.solves.push_back(std::move(ds));
        }
        est.G = est.solves[0].delta + est.solves[1].delta;
        est.se = 0.0;
        return est;
    }

    est.solves.resize(static_cast<std::size_t>(M));
    std::vector<double> values(static_cast<std::size_t>(M), 0.0);

    // Direction l draws from stream (seed, l) and writes only slot l, so the
    // result is identical for any worker count.
    struct Failure {
        long index;
        std::exception_ptr error;
    };
    std::vector<Failure> failures;
    std::mutex failures_mutex;

    auto run_range = [&](long begin, long end) {
        for (long l = begin; l < end; ++l) {
            try {
                Rng rng = derive_stream(seed, streams::sphere_direction,
                                        static_cast<std::uint64_t>(l));
                const Vec s = rng.unit_vector(d1);
                DirectionSolve ds = radial_root(model, ctx, s, lambda);
                ds.delta = delta(ctx, ds, u);
                values[static_cast<std::size_t>(l)] = ds.delta;
                est.solves[static_cast<std::size_t>(l)] = std::move(ds);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                failures.push_back({l, std::current_exception()});
                return;
            }
        }
    };

    const int nw = std::max(1, static_cast<int>(std::min<long>(workers, M)));
    if (nw == 1) {
        run_range(0, M);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (M + nw - 1) / nw;
        for (int w = 0; w < nw; ++w) {
            const long begin = w * chunk;
            const long end = std::min<long>(M, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    if (!failures.empty()) {
        auto worst = std::min_element(
            failures.begin(), failures.end(),
            [](const Failure& a, const Failure& b) { return a.index < b.index; });
        std::rethrow_exception(worst->error);
    }

    const double surface = 2.0 * std::pow(kPi, 0.5 * d1) / std::tgamma(0.5 * d1);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(M);
    est.G = surface * mean;

    if (M >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(M - 1));
        est.se = surface * sd / std::sqrt(static_cast<double>(M));
    }
    return est;
}

double lr_tail(long N, int d1, double u, double G, bool* clamped) {
    if (u <= 0.0 || G <= 0.0) throw DomainError("lr_tail: need u > 0 and G > 0");
    if (clamped != nullptr) *clamped = false;

    const double n = static_cast<double>(N);
    double p = chi_sq_tail(d1, n * u * u);
    if (G != 1.0) {
        const double log_cn = 0.5 * d1 * std::log(n) - (0.5 * d1 - 1.0) * std::log(2.0) -
                              std::lgamma(0.5 * d1);
        const double log_mag = log_cn - std::log(n) + d1 * std::log(u) -
                               0.5 * n * u * u + std::log(std::fabs(G - 1.0)) -
                               2.0 * std::log(u);
        p += (G > 1.0 ? 1.0 : -1.0) * std::exp(log_mag);
    }
    if (p < 0.0 || p > 1.0) {
        if (clamped != nullptr) *clamped = true;
        p = std::clamp(p, 0.0, 1.0);
    }
    return p;
}

double bn_tail(long N, int d1, double u, double G) {
    if (u <= 0.0) throw DomainError("bn_tail: need u > 0");
    if (G <= 0.0)
        throw NonpositiveG("bn_tail: G = " + std::to_string(G) +
                           "; raise the sphere sample count");
    const double u_star = u - std::log(G) / (static_cast<double>(N) * u);
    if (u_star <= 0.0) return 1.0;
    return chi_sq_tail(d1, static_cast<double>(N) * u_star * u_star);
}

TailResult tail_probabilities(const TiltingModel& model, const ConditionalContext& ctx,
                              double lambda, const TailOptions& options) {
    TailResult out;
    out.lambda = lambda;
    out.seed = options.seed;

    if (lambda <= 0.0) {
        // The event {Lambda - Lambda_0 >= 0} is everything.
        out.u = 0.0;
        out.u_star = 0.0;
        out.M = 0;
        return out;
    }

    const long N = model.population();
    const int d1 = model.d1();
    out.u = std::sqrt(2.0 * lambda);

    const GEstimate est = estimate_G(model, ctx, lambda, options.sphere_samples,
                                     options.seed, options.workers);
    out.G = est.G;
    out.G_se = est.se;
    out.M = d1 == 1 ? 2 : options.sphere_samples;

    out.p_chisq = chi_sq_tail(d1, static_cast<double>(N) * out.u * out.u);
    out.p_lr = lr_tail(N, d1, out.u, out.G, &out.p_lr_clamped);
    out.p_bn = bn_tail(N, d1, out.u, out.G);
    out.u_star = out.u - std::log(out.G) / (static_cast<double>(N) * out.u);
    return out;
}

}  // namespace saddleperm
