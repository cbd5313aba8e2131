#pragma once

// Point estimators of the population mode built on Pearson's relation
// mode ~ 3 median - 2 mean: the naive estimator, the ratio and product
// estimators that borrow the known auxiliary mode, and their transformed
// versions shifted by a characterizing scalar.
//
// Means are always summed over the sorted values, so a sample that is a
// permutation of the population reproduces the population mode bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

#include "modeest/dataset.hpp"

namespace modeest {

/// Middle order statistic, or the midpoint of the two central ones for even n.
double median_of_sorted(std::span<const double> sorted);
double mean_of_sorted(std::span<const double> sorted);

/// Throws UsageError on empty input.
double sample_median(std::span<const double> values);
double sample_mean(std::span<const double> values);

/// 3 * median - 2 * mean. Requires at least two values.
double naive_mode(std::span<const double> values);

struct SampleMoments {
  std::size_t n = 0;
  double mean_y = 0.0;
  double mean_x = 0.0;
  double median_y = 0.0;
  double median_x = 0.0;
  double mode_y = 0.0;  ///< naive mode of y
  double mode_x = 0.0;  ///< naive mode of x

  static SampleMoments from(std::span<const double> y, std::span<const double> x);
  static SampleMoments from(const SampleDraw& draw) { return from(draw.y, draw.x); }
};

/// Characterizing scalars: l1 shifts the transformed ratio estimator, k1 the
/// transformed product estimator.
struct ScalarChoice {
  double l1 = 0.0;
  double k1 = 0.0;
};

enum class Estimator { Naive, Ratio, Product, TransformedRatio, TransformedProduct };
inline constexpr std::size_t kEstimatorCount = 5;
inline constexpr Estimator kAllEstimators[kEstimatorCount] = {
    Estimator::Naive, Estimator::Ratio, Estimator::Product, Estimator::TransformedRatio,
    Estimator::TransformedProduct};

/// Stable identifier used in reports: naive, ratio, product, transformed_ratio,
/// transformed_product.
std::string_view estimator_name(Estimator e);

/// ratio: ytilde * X / xtilde. The sample auxiliary mode must be nonzero and on
/// the same side of zero as the population mode X.
double ratio_estimate(const SampleMoments& sm, double pop_mode_x);

/// product: ytilde * xtilde / X, X != 0.
double product_estimate(const SampleMoments& sm, double pop_mode_x);

/// ytilde * (X + l1) / (xtilde + l1). The shifted denominators must be nonzero
/// and share a sign; a crossing is an error, never a silent sign flip.
double transformed_ratio_estimate(const SampleMoments& sm, double pop_mode_x, double l1);

/// ytilde * (xtilde + k1) / (X + k1), X + k1 != 0.
double transformed_product_estimate(const SampleMoments& sm, double pop_mode_x, double k1);

/// True when ytilde-type ratio with shift `shift` is well defined for this
/// sample: xtilde + shift and X + shift are nonzero with the same sign.
bool ratio_denominator_ok(double sample_mode_x, double pop_mode_x, double shift) noexcept;

struct EstimateSet {
  double naive = 0.0;
  double ratio = 0.0;
  double product = 0.0;
  double transformed_ratio = 0.0;
  double transformed_product = 0.0;
  ScalarChoice scalars;

  double operator[](Estimator e) const noexcept;
};

/// All five estimators from one sample. Errors are prefixed with the
/// estimator's name.
EstimateSet estimate_all(const SampleMoments& sm, double pop_mode_x, ScalarChoice scalars);
EstimateSet estimate_all(const SampleDraw& draw, double pop_mode_x, ScalarChoice scalars);

}  // namespace modeest
