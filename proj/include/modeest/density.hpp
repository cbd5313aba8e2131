#pragma once

// Marginal density at the median, f(M), which every variance formula for the
// naive mode estimators consumes.

#include <optional>
#include <span>
#include <string_view>

namespace modeest {

struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
};

struct DensityMethod {
  enum class Kind { GammaMle, KdeSilverman };

  Kind kind = Kind::GammaMle;
  std::optional<double> bandwidth;  ///< KDE only; overrides Silverman's rule

  static DensityMethod gamma_mle() { return {}; }
  static DensityMethod kde(std::optional<double> bandwidth = std::nullopt);

  std::string_view name() const noexcept { return kind == Kind::GammaMle ? "gamma" : "kde"; }
};

/// Gamma maximum likelihood. Newton iterations on ln k - digamma(k) = s with
/// s = ln(mean) - mean(ln v), started from the moment estimate. Needs at
/// least 10 positive values that are not all equal.
GammaParams fit_gamma(std::span<const double> values);

/// Gamma density, evaluated in log space. t must be positive.
double gamma_pdf(const GammaParams& params, double t);

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when the IQR is 0.
double silverman_bandwidth(std::span<const double> values);

/// Gaussian kernel density estimate at `point`.
double kde_density(std::span<const double> values, double point, double bandwidth);

/// Density of `values` evaluated at their median under `method`.
double density_at_median(std::span<const double> values, const DensityMethod& method);

}  // namespace modeest
