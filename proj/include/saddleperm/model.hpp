#pragma once

#include "saddleperm/linalg.hpp"
#include "saddleperm/scores.hpp"

namespace saddleperm {

enum class ModelKind { KSample, TwoSampleMV };

// Value, gradient and Hessian of the average cumulant generating function.
struct CgfValue {
    double kappa = 0.0;
    Vec grad;
    SymMatrix hess;
};

// Finite-population exponential tilting model. The tilt vector is
// tau = (tau_0, tau_1) with d0 lattice coordinates followed by d1 continuous
// coordinates.
//
// KSample: element m carries an indicator over groups 1..k-1 (group k is the
// baseline) together with a_m times that indicator, so
//   kappa(tau) = N^-1 sum_m log(p_k + sum_i p_i exp(tau_0i + tau_1i a_m)),
// with d0 = d1 = k - 1.
//
// TwoSampleMV: element i carries a Bernoulli(p) indicator and a_i times it, so
//   kappa(tau) = N^-1 sum_i log(q + p exp(tau_0 + tau_1^T a_i)),
// with d0 = 1, d1 = l.
class TiltingModel {
public:
    static TiltingModel ksample(ScoreSet scores, GroupDesign design);
    static TiltingModel two_sample(ScoreSet scores, GroupDesign design);

    ModelKind kind() const { return kind_; }
    const ScoreSet& scores() const { return scores_; }
    const GroupDesign& design() const { return design_; }

    int population() const { return design_.total(); }
    int d0() const { return d0_; }
    int d1() const { return d1_; }
    int dim() const { return d0_ + d1_; }

    // kappa'(0) = (p, 0); this is its lattice part.
    Vec lattice_mean() const;

private:
    TiltingModel(ModelKind kind, ScoreSet scores, GroupDesign design, int d0, int d1)
        : kind_(kind), scores_(std::move(scores)), design_(std::move(design)),
          d0_(d0), d1_(d1) {}

    ModelKind kind_;
    ScoreSet scores_;
    GroupDesign design_;
    int d0_;
    int d1_;
};

// kappa with analytic gradient and Hessian at tau (length d0 + d1). Throws
// OverflowGuard when a raw exponent exceeds 700.
CgfValue cgf(const TiltingModel& model, const Vec& tau);

// In-place variant for solver hot paths; reuses out's storage.
void cgf_into(const TiltingModel& model, const Vec& tau, CgfValue& out);

// The lattice-marginal kappa_0(tau_0) = kappa((tau_0, 0)), in closed form,
// with gradient and Hessian of dimension d0.
CgfValue cgf_lattice(const TiltingModel& model, const Vec& tau0);

}  // namespace saddleperm
