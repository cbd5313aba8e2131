#include "modeest/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "modeest/error.hpp"

namespace modeest::special {

double log_gamma(double x) {
  if (!(x > 0.0)) throw UsageError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw UsageError("digamma: argument must be positive and finite");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  // Bernoulli terms B_2k / (2k x^2k), k = 1..7.
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
  return acc + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw UsageError("trigamma: argument must be positive and finite");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
  const double series =
      inv2 * inv *
      (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * (691.0 / 2730))))));
  return acc + inv + 0.5 * inv2 + series;
}

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw UsageError("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double df, double t) {
  if (!(df > 0.0)) throw UsageError("student_t_cdf: df must be positive");
  if (std::isnan(t)) throw UsageError("student_t_cdf: t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double df, double p) {
  if (!(df >= 1.0) || !std::isfinite(df)) throw UsageError("t_quantile: df must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw UsageError("t_quantile: p must lie in (0, 1), got " + std::to_string(p));
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(df, 1.0 - p);

  // Upper tail probability q = 1 - p. Work with the tail directly so that p
  // near 1 keeps its precision: tail(t) = 0.5 * I_{df/(df+t^2)}(df/2, 1/2).
  const double q = 1.0 - p;
  const auto tail = [df](double t) { return 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t)); };
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("t_quantile: failed to bracket");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (tail(mid) > q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace modeest::special
