#include "modeest/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "modeest/error.hpp"
#include "modeest/special.hpp"

namespace modeest {

double PopulationTheory::corr_yx() const { return cov_yx / std::sqrt(var_y * var_x); }

namespace {

struct Centered {
  double mean = 0.0;
  double median = 0.0;
  double var = 0.0;
  std::vector<char> below;  // I = 1 when value <= median
};

Centered center(std::span<const double> values, const char* name) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Centered c;
  c.mean = mean_of_sorted(sorted);
  c.median = median_of_sorted(sorted);
  double ss = 0.0;
  for (const double v : values) ss += (v - c.mean) * (v - c.mean);
  c.var = ss / static_cast<double>(values.size() - 1);
  if (!(c.var > 0.0)) throw DataError(std::string("variable ") + name + " is constant");
  c.below.reserve(values.size());
  for (const double v : values) c.below.push_back(v <= c.median ? 1 : 0);
  return c;
}

double indicator_moment(std::span<const double> values, double mean, const std::vector<char>& below) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += (values[i] - mean) * (below[i] - 0.5);
  return acc / static_cast<double>(values.size() - 1);
}

// Bracketed terms of the first-order variances, without the (1 - f)/n factor.
struct Brackets {
  double y = 0.0;
  double x = 0.0;
  double cov = 0.0;
};

Brackets brackets(const PopulationTheory& t) {
  const double gy = 1.0 / t.density_y;
  const double gx = 1.0 / t.density_x;
  Brackets b;
  b.y = 2.25 * gy * gy + 4.0 * t.var_y + 12.0 * t.s_y_my * gy;
  b.x = 2.25 * gx * gx + 4.0 * t.var_x + 12.0 * t.s_x_mx * gx;
  b.cov = 9.0 * gx * gy * (t.p.p11 - 0.25) + 6.0 * t.s_y_mx * gx + 6.0 * t.s_x_my * gy + 4.0 * t.cov_yx;
  if (!(b.y > 0.0)) {
    throw NumericError("first-order V(ytilde) is not positive (bracket " + std::to_string(b.y) +
                       "); the approximation breaks down on this population");
  }
  if (!(b.x > 0.0)) {
    throw NumericError("first-order V(xtilde) is not positive (bracket " + std::to_string(b.x) +
                       "); the approximation breaks down on this population");
  }
  if (std::fabs(b.cov) > std::sqrt(b.y * b.x) * (1.0 + 1e-12)) {
    throw NumericError("first-order correlation of the naive modes lies outside [-1, 1]");
  }
  return b;
}

void check_n(const PopulationTheory& t, std::size_t n) {
  if (n == 0 || n > t.N) {
    throw UsageError("sample size n=" + std::to_string(n) + " outside [1, " + std::to_string(t.N) + "]");
  }
}

void require_mode_x(const PopulationTheory& t) {
  if (t.mode_x == 0.0) throw NumericError("population auxiliary mode is zero");
}

}  // namespace

PopulationTheory compute_population_theory(const PairedPopulation& pop, const DensityMethod& method) {
  const std::size_t N = pop.size();
  const Centered cy = center(pop.y(), "y");
  const Centered cx = center(pop.x(), "x");

  PopulationTheory t;
  t.N = N;
  t.density_method = method;
  t.mean_y = cy.mean;
  t.mean_x = cx.mean;
  t.median_y = cy.median;
  t.median_x = cx.median;
  t.var_y = cy.var;
  t.var_x = cx.var;
  t.mode_y = 3.0 * cy.median - 2.0 * cy.mean;
  t.mode_x = 3.0 * cx.median - 2.0 * cx.mean;

  double cov = 0.0;
  std::size_t n11 = 0;
  std::size_t n12 = 0;
  std::size_t n21 = 0;
  std::size_t n22 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    cov += (pop.y()[i] - cy.mean) * (pop.x()[i] - cx.mean);
    const bool y_low = cy.below[i] != 0;
    const bool x_low = cx.below[i] != 0;
    if (y_low && x_low) ++n11;
    else if (!y_low && x_low) ++n21;
    else if (y_low) ++n12;
    else ++n22;
  }
  t.cov_yx = cov / static_cast<double>(N - 1);
  const double dN = static_cast<double>(N);
  t.p = {static_cast<double>(n11) / dN, static_cast<double>(n12) / dN, static_cast<double>(n21) / dN,
         static_cast<double>(n22) / dN};

  t.s_y_my = indicator_moment(pop.y(), cy.mean, cy.below);
  t.s_x_mx = indicator_moment(pop.x(), cx.mean, cx.below);
  t.s_y_mx = indicator_moment(pop.y(), cy.mean, cx.below);
  t.s_x_my = indicator_moment(pop.x(), cx.mean, cy.below);

  t.density_y = density_at_median(pop.y(), method);
  t.density_x = density_at_median(pop.x(), method);
  t.mode_ratio = t.mode_x != 0.0 ? t.mode_y / t.mode_x : 0.0;
  return t;
}

IndicatorIdentity indicator_identity(const PairedPopulation& pop) {
  const std::size_t N = pop.size();
  const double med_y = sample_median(pop.y());
  const double med_x = sample_median(pop.x());
  std::size_t n11 = 0;
  std::size_t ny = 0;
  std::size_t nx = 0;
  double cross = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const int iy = pop.y()[i] <= med_y ? 1 : 0;
    const int ix = pop.x()[i] <= med_x ? 1 : 0;
    n11 += static_cast<std::size_t>(iy & ix);
    ny += static_cast<std::size_t>(iy);
    nx += static_cast<std::size_t>(ix);
    cross += (ix - 0.5) * (iy - 0.5);
  }
  const double dN = static_cast<double>(N);
  IndicatorIdentity out;
  out.p11 = static_cast<double>(n11) / dN;
  out.share_y = static_cast<double>(ny) / dN;
  out.share_x = static_cast<double>(nx) / dN;
  out.cross_moment = cross / (dN - 1.0);
  out.lhs = out.p11 - 0.25;
  out.rhs = (dN - 1.0) / dN * out.cross_moment + 0.5 * (out.share_x - 0.5) + 0.5 * (out.share_y - 0.5);
  out.balanced = 2 * ny == N && 2 * nx == N;
  return out;
}

double median_variance(const PopulationTheory& theory, std::size_t n) {
  check_n(theory, n);
  const double f = static_cast<double>(n) / static_cast<double>(theory.N);
  return (1.0 - f) / (4.0 * static_cast<double>(n)) / (theory.density_y * theory.density_y);
}

ModeMomentSet mode_moments(const PopulationTheory& theory, std::size_t n) {
  check_n(theory, n);
  const Brackets b = brackets(theory);
  ModeMomentSet mm;
  mm.n = n;
  mm.f = static_cast<double>(n) / static_cast<double>(theory.N);
  const double prefactor = (1.0 - mm.f) / static_cast<double>(n);
  mm.var_mode_y = prefactor * b.y;
  mm.var_mode_x = prefactor * b.x;
  mm.cov_modes = prefactor * b.cov;
  if (mm.var_mode_y > 0.0 && mm.var_mode_x > 0.0) {
    mm.rho = mm.cov_modes / std::sqrt(mm.var_mode_y * mm.var_mode_x);
  }
  mm.cv_y = theory.mode_y != 0.0 ? std::sqrt(mm.var_mode_y) / theory.mode_y : 0.0;
  mm.cv_x = theory.mode_x != 0.0 ? std::sqrt(mm.var_mode_x) / theory.mode_x : 0.0;
  return mm;
}

double mse_naive_ratio(const ModeMomentSet& mm, const PopulationTheory& theory) {
  require_mode_x(theory);
  const double r = theory.mode_y / theory.mode_x;
  return mm.var_mode_y + r * r * mm.var_mode_x - 2.0 * r * mm.cov_modes;
}

double mse_naive_product(const ModeMomentSet& mm, const PopulationTheory& theory) {
  require_mode_x(theory);
  const double r = theory.mode_y / theory.mode_x;
  return mm.var_mode_y + r * r * mm.var_mode_x + 2.0 * r * mm.cov_modes;
}

BiasMse transformed_ratio_theory(const ModeMomentSet& mm, const PopulationTheory& theory, double l1) {
  const double den = theory.mode_x + l1;
  if (den == 0.0) throw NumericError("transformed_ratio: X + L1 vanishes");
  const double a = theory.mode_y / den;
  // Ytilde [V/(X+L1)^2 - Cov/(Ytilde (X+L1))], written without dividing by Ytilde.
  const double bias = a * mm.var_mode_x / den - mm.cov_modes / den;
  const double mse = mm.var_mode_y + a * a * mm.var_mode_x - 2.0 * a * mm.cov_modes;
  return {bias, mse};
}

BiasMse transformed_product_theory(const ModeMomentSet& mm, const PopulationTheory& theory, double k1) {
  const double den = theory.mode_x + k1;
  if (den == 0.0) throw NumericError("transformed_product: X + K1 vanishes");
  const double a = theory.mode_y / den;
  const double bias = a * mm.var_mode_x / den + mm.cov_modes / den;
  const double mse = mm.var_mode_y + a * a * mm.var_mode_x + 2.0 * a * mm.cov_modes;
  return {bias, mse};
}

ScalarChoice optimal_scalars(const ModeMomentSet& mm, const PopulationTheory& theory) {
  if (mm.cov_modes == 0.0) throw NumericError("Cov(ytilde, xtilde) = 0: no finite optimal scalar");
  const double slope = theory.mode_y * mm.var_mode_x / mm.cov_modes;
  return {slope - theory.mode_x, -slope - theory.mode_x};
}

ScalarChoice optimal_scalars(const PopulationTheory& theory) {
  const Brackets b = brackets(theory);
  if (b.cov == 0.0) throw NumericError("Cov(ytilde, xtilde) = 0: no finite optimal scalar");
  const double slope = theory.mode_y * b.x / b.cov;
  return {slope - theory.mode_x, -slope - theory.mode_x};
}

OptimalMse optimal_mse(const ModeMomentSet& mm, const PopulationTheory& theory) {
  if (!mm.rho) throw NumericError("optimal MSE undefined: a naive-mode variance is zero");
  const ScalarChoice opt = optimal_scalars(mm, theory);
  OptimalMse out;
  out.mse_tr_opt = transformed_ratio_theory(mm, theory, opt.l1).mse;
  out.mse_tp_opt = transformed_product_theory(mm, theory, opt.k1).mse;
  const double rho2 = *mm.rho * *mm.rho;
  out.closed_form = mm.var_mode_y * (1.0 - rho2);
  out.printed_tp_closed_form = mm.var_mode_y * (1.0 + rho2);
  return out;
}

EfficiencyConditions efficiency_conditions(const ModeMomentSet& mm, const PopulationTheory& theory, double l1) {
  if (!mm.rho || mm.cv_y == 0.0 || mm.cv_x == 0.0 || theory.mode_y == 0.0) {
    throw NumericError("efficiency conditions: degenerate coefficient of variation");
  }
  require_mode_x(theory);
  const double den = theory.mode_x + l1;
  if (den == 0.0) throw NumericError("efficiency conditions: X + L1 vanishes");
  const double shrink = theory.mode_x / den;
  const double cv_ratio = mm.cv_x / mm.cv_y;
  const double rho = *mm.rho;

  EfficiencyConditions out;
  out.naive_threshold = 0.5 * shrink * cv_ratio;
  out.ratio_threshold = 0.5 * (shrink + 1.0) * cv_ratio;

  // a = Ytilde/(X+L1), R = Ytilde/X. MSE(T_R) <= V(ytilde) iff a (a V - 2 Cov) <= 0,
  // MSE(T_R) <= MSE(t_r) iff (a - R)((a + R) V - 2 Cov) <= 0.
  const double a = theory.mode_y / den;
  const double r = theory.mode_y / theory.mode_x;
  out.vs_naive = a > 0.0 ? rho >= out.naive_threshold : rho <= out.naive_threshold;
  if (a == r) {
    out.vs_ratio = true;
  } else {
    out.vs_ratio = a > r ? rho >= out.ratio_threshold : rho <= out.ratio_threshold;
  }
  return out;
}

double relative_efficiency(double mse_base, double mse) {
  if (!(mse > 0.0)) throw NumericError("relative efficiency: MSE must be positive");
  return 100.0 * mse_base / mse;
}

double t_quantile(double df, double p) { return special::t_quantile(df, p); }

ConfidenceInterval confidence_interval(double estimate, double mse, std::size_t n, double level) {
  if (n < 2) throw UsageError("confidence interval: n must be at least 2");
  if (!(mse >= 0.0)) throw UsageError("confidence interval: MSE must be non-negative");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("confidence interval: level must lie in (0, 1)");
  const double df = static_cast<double>(n - 1);
  const double alpha = 1.0 - level;
  const double half = t_quantile(df, 1.0 - alpha / 2.0) * std::sqrt(mse);
  return {estimate - half, estimate + half, level, df};
}

TheoryReport theory_report(const PopulationTheory& theory, std::size_t n, ScalarChoice scalars) {
  require_mode_x(theory);
  TheoryReport r;
  r.n = n;
  r.scalars = scalars;
  r.moments = mode_moments(theory, n);
  r.optimum = optimal_scalars(theory);
  r.median_variance_y = median_variance(theory, n);

  const auto& mm = r.moments;
  r.mse_naive = mm.var_mode_y;
  r.mse_ratio = mse_naive_ratio(mm, theory);
  r.mse_product = mse_naive_product(mm, theory);
  const BiasMse tr = transformed_ratio_theory(mm, theory, scalars.l1);
  const BiasMse tp = transformed_product_theory(mm, theory, scalars.k1);
  r.mse_tr = tr.mse;
  r.mse_tp = tp.mse;
  r.bias_tr = tr.bias;
  r.bias_tp = tp.bias;
  r.bias_ratio = transformed_ratio_theory(mm, theory, 0.0).bias;
  r.bias_product = transformed_product_theory(mm, theory, 0.0).bias;

  if (mm.rho) {
    r.optimal.mse_tr_opt = transformed_ratio_theory(mm, theory, r.optimum.l1).mse;
    r.optimal.mse_tp_opt = transformed_product_theory(mm, theory, r.optimum.k1).mse;
    const double rho2 = *mm.rho * *mm.rho;
    r.optimal.closed_form = mm.var_mode_y * (1.0 - rho2);
    r.optimal.printed_tp_closed_form = mm.var_mode_y * (1.0 + rho2);
    const auto re = [&](double mse) -> std::optional<double> {
      if (mse > 0.0) return relative_efficiency(r.mse_naive, mse);
      return std::nullopt;
    };
    r.re_ratio = re(r.mse_ratio);
    r.re_product = re(r.mse_product);
    r.re_tr = re(r.mse_tr);
    r.re_tp = re(r.mse_tp);
    r.re_tr_opt = re(r.optimal.mse_tr_opt);
    if (theory.mode_y != 0.0 && theory.mode_x + scalars.l1 != 0.0) {
      r.conditions = efficiency_conditions(mm, theory, scalars.l1);
    }
  }
  return r;
}

}  // namespace modeest
