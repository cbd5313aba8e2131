#include "modeest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "modeest/error.hpp"

namespace modeest {

double median_of_sorted(std::span<const double> sorted) {
  if (sorted.empty()) throw UsageError("median of an empty set");
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double mean_of_sorted(std::span<const double> sorted) {
  if (sorted.empty()) throw UsageError("mean of an empty set");
  double sum = 0.0;
  for (const double v : sorted) sum += v;
  return sum / static_cast<double>(sorted.size());
}

namespace {

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double sample_median(std::span<const double> values) {
  if (values.empty()) throw UsageError("sample_median: empty input");
  return median_of_sorted(sorted_copy(values));
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw UsageError("sample_mean: empty input");
  return mean_of_sorted(sorted_copy(values));
}

double naive_mode(std::span<const double> values) {
  if (values.size() < 2) throw UsageError("naive_mode: need at least two values");
  const auto sorted = sorted_copy(values);
  return 3.0 * median_of_sorted(sorted) - 2.0 * mean_of_sorted(sorted);
}

SampleMoments SampleMoments::from(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) throw UsageError("sample columns differ in length");
  if (y.size() < 2) throw UsageError("sample moments: need at least two units");
  const auto ys = sorted_copy(y);
  const auto xs = sorted_copy(x);
  SampleMoments sm;
  sm.n = y.size();
  sm.mean_y = mean_of_sorted(ys);
  sm.mean_x = mean_of_sorted(xs);
  sm.median_y = median_of_sorted(ys);
  sm.median_x = median_of_sorted(xs);
  sm.mode_y = 3.0 * sm.median_y - 2.0 * sm.mean_y;
  sm.mode_x = 3.0 * sm.median_x - 2.0 * sm.mean_x;
  return sm;
}

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Naive: return "naive";
    case Estimator::Ratio: return "ratio";
    case Estimator::Product: return "product";
    case Estimator::TransformedRatio: return "transformed_ratio";
    case Estimator::TransformedProduct: return "transformed_product";
  }
  return "unknown";
}

bool ratio_denominator_ok(double sample_mode_x, double pop_mode_x, double shift) noexcept {
  const double sample_den = sample_mode_x + shift;
  const double pop_den = pop_mode_x + shift;
  if (sample_den == 0.0 || pop_den == 0.0) return false;
  return (sample_den > 0.0) == (pop_den > 0.0);
}

double ratio_estimate(const SampleMoments& sm, double pop_mode_x) {
  if (!ratio_denominator_ok(sm.mode_x, pop_mode_x, 0.0)) {
    throw NumericError("ratio: sample auxiliary mode " + std::to_string(sm.mode_x) +
                       " is zero or of opposite sign to the population mode " + std::to_string(pop_mode_x));
  }
  return sm.mode_y * (pop_mode_x / sm.mode_x);
}

double product_estimate(const SampleMoments& sm, double pop_mode_x) {
  if (pop_mode_x == 0.0) throw NumericError("product: population auxiliary mode is zero");
  return sm.mode_y * (sm.mode_x / pop_mode_x);
}

double transformed_ratio_estimate(const SampleMoments& sm, double pop_mode_x, double l1) {
  if (!ratio_denominator_ok(sm.mode_x, pop_mode_x, l1)) {
    throw NumericError("transformed_ratio: xtilde + L1 = " + std::to_string(sm.mode_x + l1) +
                       " is zero or of opposite sign to X + L1 = " + std::to_string(pop_mode_x + l1));
  }
  return sm.mode_y * ((pop_mode_x + l1) / (sm.mode_x + l1));
}

double transformed_product_estimate(const SampleMoments& sm, double pop_mode_x, double k1) {
  if (pop_mode_x + k1 == 0.0) throw NumericError("transformed_product: X + K1 is zero");
  return sm.mode_y * ((sm.mode_x + k1) / (pop_mode_x + k1));
}

double EstimateSet::operator[](Estimator e) const noexcept {
  switch (e) {
    case Estimator::Naive: return naive;
    case Estimator::Ratio: return ratio;
    case Estimator::Product: return product;
    case Estimator::TransformedRatio: return transformed_ratio;
    case Estimator::TransformedProduct: return transformed_product;
  }
  return naive;
}

EstimateSet estimate_all(const SampleMoments& sm, double pop_mode_x, ScalarChoice scalars) {
  EstimateSet out;
  out.scalars = scalars;
  out.naive = sm.mode_y;
  out.ratio = ratio_estimate(sm, pop_mode_x);
  out.product = product_estimate(sm, pop_mode_x);
  out.transformed_ratio = transformed_ratio_estimate(sm, pop_mode_x, scalars.l1);
  out.transformed_product = transformed_product_estimate(sm, pop_mode_x, scalars.k1);
  return out;
}

EstimateSet estimate_all(const SampleDraw& draw, double pop_mode_x, ScalarChoice scalars) {
  return estimate_all(SampleMoments::from(draw), pop_mode_x, scalars);
}

}  // namespace modeest
