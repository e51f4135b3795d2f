#pragma once

#include <span>

namespace circlegas {

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
double log_add_exp(double a, double b);
/// log(1 - exp(-x)) for x >= 0, accurate at both ends.
double log1m_exp(double x);
/// log(sum exp(v_i)); -inf for an empty span.
double log_sum_exp(std::span<const double> values);

/// Regularized incomplete gamma functions. Both are returned so that the
/// smaller of the two never suffers cancellation.
struct IncompleteGamma {
    double p = 0.0;  // gamma(s,x)/Gamma(s)
    double q = 1.0;  // Gamma(s,x)/Gamma(s)
};

/// P and Q for s > 0, x >= 0. Series for x < s+1, Lentz continued fraction otherwise.
IncompleteGamma regularized_gamma(double s, double x);

/// Upper incomplete gamma Gamma(s,x) = int_x^inf t^{s-1} e^{-t} dt, s > 0, x >= 0.
double upper_incomplete_gamma(double s, double x);
/// log Gamma(s,x), usable when Gamma(s,x) over/underflows.
double log_upper_incomplete_gamma(double s, double x);

}  // namespace circlegas
