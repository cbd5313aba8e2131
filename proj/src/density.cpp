#include "modeest/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "modeest/dataset.hpp"
#include "modeest/error.hpp"
#include "modeest/estimators.hpp"
#include "modeest/special.hpp"

namespace modeest {

DensityMethod DensityMethod::kde(std::optional<double> bandwidth) {
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) {
    throw UsageError("kde bandwidth must be positive");
  }
  return {Kind::KdeSilverman, bandwidth};
}

GammaParams fit_gamma(std::span<const double> values) {
  if (values.size() < 10) throw DataError("gamma fit: need at least 10 values");
  double sum = 0.0;
  double sum_log = 0.0;
  for (const double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("gamma fit: non-positive value " + std::to_string(v) + " (use the kde density method)");
    }
    sum += v;
    sum_log += std::log(v);
  }
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / n;
  const double s = std::log(mean) - sum_log / n;
  if (!(variance > 0.0) || !(s > 0.0)) throw DataError("gamma fit: zero variance, MLE undefined");

  double k = mean * mean / variance;
  for (int iter = 0; iter < 100; ++iter) {
    const double g = std::log(k) - special::digamma(k) - s;
    const double dg = 1.0 / k - special::trigamma(k);
    double next = k - g / dg;
    if (!(next > 0.0)) next = 0.5 * k;
    if (std::fabs(next - k) < 1e-10 * k) return {next, mean / next};
    k = next;
  }
  throw NumericError("gamma fit: Newton iteration did not converge in 100 steps");
}

double gamma_pdf(const GammaParams& params, double t) {
  if (!(params.shape > 0.0) || !(params.scale > 0.0)) throw UsageError("gamma_pdf: parameters must be positive");
  if (!(t > 0.0)) throw UsageError("gamma_pdf: t must be positive");
  const double k = params.shape;
  const double theta = params.scale;
  const double log_pdf = (k - 1.0) * std::log(t) - t / theta - special::log_gamma(k) - k * std::log(theta);
  return std::exp(log_pdf);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw DataError("kde: need at least two values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double mean = mean_of_sorted(sorted);
  double ss = 0.0;
  for (const double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
  const Quartiles q = tukey_quartiles(sorted);
  const double iqr = q.upper - q.lower;
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
  if (!(h > 0.0)) throw DataError("kde: zero bandwidth (constant data)");
  return h;
}

double kde_density(std::span<const double> values, double point, double bandwidth) {
  if (values.empty()) throw DataError("kde: no values");
  if (!(bandwidth > 0.0)) throw DataError("kde: zero bandwidth");
  double acc = 0.0;
  for (const double v : values) {
    const double u = (point - v) / bandwidth;
    acc += std::exp(-0.5 * u * u);
  }
  return acc / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
}

double density_at_median(std::span<const double> values, const DensityMethod& method) {
  const double median = sample_median(values);
  double density = 0.0;
  if (method.kind == DensityMethod::Kind::GammaMle) {
    density = gamma_pdf(fit_gamma(values), median);
  } else {
    const double h = method.bandwidth ? *method.bandwidth : silverman_bandwidth(values);
    density = kde_density(values, median, h);
  }
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw NumericError("density at median is not positive");
  }
  return density;
}

}  // namespace modeest
