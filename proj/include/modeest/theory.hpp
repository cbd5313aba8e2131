#pragma once

// Population-level theory for the mode estimators: the quantities the
// first-order formulas consume, the design variances of the naive modes under
// SRSWOR, and every closed-form MSE, bias, optimum, efficiency condition and
// confidence interval derived from them.

#include <cstddef>
#include <optional>

#include "modeest/dataset.hpp"
#include "modeest/density.hpp"
#include "modeest/estimators.hpp"

namespace modeest {

/// Proportions of units on each side of the two medians. p11: y <= My and
/// x <= Mx; p21: y > My, x <= Mx; p12: y <= My, x > Mx; p22: both above.
struct ProportionMatrix {
  double p11 = 0.0;
  double p12 = 0.0;
  double p21 = 0.0;
  double p22 = 0.0;
};

struct PopulationTheory {
  std::size_t N = 0;
  double mean_y = 0.0;
  double mean_x = 0.0;
  double var_y = 0.0;  ///< N-1 divisor
  double var_x = 0.0;
  double cov_yx = 0.0;
  double median_y = 0.0;
  double median_x = 0.0;
  double mode_y = 0.0;  ///< 3 My - 2 Ybar
  double mode_x = 0.0;
  double density_y = 0.0;  ///< f_y(My)
  double density_x = 0.0;
  // Covariances between a variable and a centered below-median indicator
  // (I - 0.5), N-1 divisor. s_y_mx pairs y with the indicator of x.
  double s_y_my = 0.0;
  double s_x_mx = 0.0;
  double s_y_mx = 0.0;
  double s_x_my = 0.0;
  ProportionMatrix p;
  double mode_ratio = 0.0;  ///< Ytilde / Xtilde
  DensityMethod density_method;

  double corr_yx() const;
};

/// Throws DataError for a constant variable or a failed density estimate.
PopulationTheory compute_population_theory(const PairedPopulation& pop, const DensityMethod& method);

/// Both sides of the indicator identity relating p11 to the indicator
/// cross-moment. The cross-moment uses the N-1 divisor; p11 and the marginal
/// proportions use N. In general
///   p11 - 0.25 = (N-1)/N * cross + 0.5 (p_x - 0.5) + 0.5 (p_y - 0.5),
/// which collapses to p11 - 0.25 = (N-1)/N * cross whenever exactly half the
/// units sit at or below each median (even N, no ties at the median).
struct IndicatorIdentity {
  double p11 = 0.0;
  double share_y = 0.0;  ///< proportion with y <= My
  double share_x = 0.0;
  double cross_moment = 0.0;  ///< sum (I_x - 0.5)(I_y - 0.5) / (N - 1)
  double lhs = 0.0;           ///< p11 - 0.25
  double rhs = 0.0;           ///< general right-hand side above
  bool balanced = false;      ///< share_x == share_y == 0.5
};
IndicatorIdentity indicator_identity(const PairedPopulation& pop);

/// ((1 - f) / 4n) f_y(My)^-2.
double median_variance(const PopulationTheory& theory, std::size_t n);

struct ModeMomentSet {
  std::size_t n = 0;
  double f = 0.0;  ///< n / N
  double var_mode_y = 0.0;
  double var_mode_x = 0.0;
  double cov_modes = 0.0;
  std::optional<double> rho;  ///< undefined when either variance is 0
  double cv_y = 0.0;          ///< sqrt(V(ytilde)) / Ytilde
  double cv_x = 0.0;
};

/// First-order variances and covariance of the naive modes at sample size n.
/// A negative variance or |rho| > 1 is a NumericError: the approximation has
/// broken down on this population.
ModeMomentSet mode_moments(const PopulationTheory& theory, std::size_t n);

double mse_naive_ratio(const ModeMomentSet& mm, const PopulationTheory& theory);
double mse_naive_product(const ModeMomentSet& mm, const PopulationTheory& theory);

struct BiasMse {
  double bias = 0.0;
  double mse = 0.0;
};

BiasMse transformed_ratio_theory(const ModeMomentSet& mm, const PopulationTheory& theory, double l1);
BiasMse transformed_product_theory(const ModeMomentSet& mm, const PopulationTheory& theory, double k1);

/// L1 = Ytilde V(x)/Cov - Xtilde, K1 = -Ytilde V(x)/Cov - Xtilde. Requires Cov != 0.
ScalarChoice optimal_scalars(const ModeMomentSet& mm, const PopulationTheory& theory);

/// Same optimum without choosing n: the (1 - f)/n factor cancels in V/Cov.
ScalarChoice optimal_scalars(const PopulationTheory& theory);

struct OptimalMse {
  double mse_tr_opt = 0.0;           ///< transformed ratio MSE evaluated at L1_opt
  double mse_tp_opt = 0.0;           ///< transformed product MSE evaluated at K1_opt
  double closed_form = 0.0;          ///< V(ytilde) (1 - rho^2)
  double printed_tp_closed_form = 0.0;  ///< V(ytilde) (1 + rho^2), reported for comparison only
};
OptimalMse optimal_mse(const ModeMomentSet& mm, const PopulationTheory& theory);

/// When the transformed ratio estimator with shift l1 beats the naive
/// estimator and the plain ratio estimator. Thresholds are the correlation
/// bounds (1/2) (X/(X+L1)) Cx/Cy and (1/2) (X/(X+L1) + 1) Cx/Cy. The
/// booleans are decided by the sign-aware form of those bounds: when
/// Ytilde/(X+L1) is negative (respectively below Ytilde/X) the inequality on
/// rho reverses.
struct EfficiencyConditions {
  bool vs_naive = false;
  bool vs_ratio = false;
  double naive_threshold = 0.0;
  double ratio_threshold = 0.0;
};
EfficiencyConditions efficiency_conditions(const ModeMomentSet& mm, const PopulationTheory& theory, double l1);

/// 100 * mse_base / mse. NumericError when mse is not positive.
double relative_efficiency(double mse_base, double mse);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  double df = 1.0;
};

/// Student-t quantile (delegates to special::t_quantile).
double t_quantile(double df, double p);

/// estimate -/+ t_{n-1}(1 - alpha/2) sqrt(mse), level = 1 - alpha.
ConfidenceInterval confidence_interval(double estimate, double mse, std::size_t n, double level);

/// Everything the closed-form theory says about one sample size.
struct TheoryReport {
  std::size_t n = 0;
  ScalarChoice scalars;   ///< scalars the *_tr / *_tp fields are evaluated at
  ScalarChoice optimum;   ///< L1_opt, K1_opt
  ModeMomentSet moments;
  double median_variance_y = 0.0;
  double mse_naive = 0.0;
  double mse_ratio = 0.0;
  double mse_product = 0.0;
  double mse_tr = 0.0;
  double mse_tp = 0.0;
  double bias_ratio = 0.0;  ///< first-order bias of the ratio estimator (L1 = 0)
  double bias_product = 0.0;
  double bias_tr = 0.0;
  double bias_tp = 0.0;
  OptimalMse optimal;
  // Relative efficiencies in percent against the naive estimator; absent when
  // the compared MSE is 0 (n = N).
  std::optional<double> re_ratio;
  std::optional<double> re_product;
  std::optional<double> re_tr;
  std::optional<double> re_tp;
  std::optional<double> re_tr_opt;
  std::optional<EfficiencyConditions> conditions;
};

TheoryReport theory_report(const PopulationTheory& theory, std::size_t n, ScalarChoice scalars);

}  // namespace modeest
