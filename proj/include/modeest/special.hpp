#pragma once

// Special functions backing the Gamma fit and Student-t intervals.

namespace modeest::special {

/// ln Gamma(x), x > 0.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0. Recurrence up to x >= 10, then the
/// asymptotic series in 1/x^2.
double digamma(double x);

/// psi'(x) for x > 0, same scheme as digamma.
double trigamma(double x);

/// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double df, double t);

/// Inverse of student_t_cdf. df >= 1 (UsageError otherwise), p in (0, 1).
/// Bracketing bisection on the CDF; exactly 0 at p = 0.5.
double t_quantile(double df, double p);

}  // namespace modeest::special
