#pragma once

namespace saddleperm {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
// Series for x < a + 1, continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Chi-square survival function P(chi^2_d >= x) = Q(d/2, x/2).
double chi_sq_tail(int d, double x);

}  // namespace saddleperm
