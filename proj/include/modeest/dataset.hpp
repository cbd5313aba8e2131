#pragma once

// Finite populations of (y, x) pairs: construction, synthetic generation, CSV
// ingestion, six-number summaries and SRSWOR sample draws.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modeest/rng.hpp"

namespace modeest {

inline constexpr std::size_t kMinPopulationSize = 4;
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Study variable y and auxiliary variable x over N units. Immutable.
class PairedPopulation {
 public:
  /// Throws DataError unless both vectors have the same length N >= 4 and
  /// every value is finite.
  PairedPopulation(std::vector<double> y, std::vector<double> x);

  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> x() const noexcept { return x_; }
  std::size_t size() const noexcept { return y_.size(); }

 private:
  std::vector<double> y_;
  std::vector<double> x_;
};

struct GeneratorConfig {
  std::size_t population_size = 5000;
  double gamma_shape = 10.0;
  double gamma_scale = 0.667;
  double intercept = 0.75;
  double slope = 0.87;
  double noise_sd = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// x ~ Gamma(shape, scale), y = intercept + slope * x + noise_sd * z with z
/// standard normal. Deterministic for a fixed seed.
PairedPopulation generate_population(const GeneratorConfig& cfg);

/// CSV with a `y,x` header (either order, any case). Lines starting with '#'
/// before the header are comments. Errors name the offending row.
PairedPopulation parse_csv(std::string_view text);
PairedPopulation load_csv(const std::filesystem::path& path);

/// Writes `y,x` rows with round-trip (17 significant digit) precision.
void write_csv(const PairedPopulation& pop, std::ostream& out);

/// Lower quartile, median and upper quartile by Tukey's median-of-halves: for
/// odd counts the overall median is left out of both halves.
struct Quartiles {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
};
Quartiles tukey_quartiles(std::span<const double> sorted);

struct VariableSummary {
  double min = 0.0;
  double lower_quartile = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double upper_quartile = 0.0;
  double max = 0.0;
};

struct SummaryStats {
  VariableSummary y;
  VariableSummary x;
};

VariableSummary summarize_values(std::span<const double> values);
SummaryStats summarize(const PairedPopulation& pop);

/// One SRSWOR sample. `indices[k]` is the population unit behind y[k], x[k].
struct SampleDraw {
  std::vector<std::size_t> indices;
  std::vector<double> y;
  std::vector<double> x;

  std::size_t size() const noexcept { return indices.size(); }
};

/// Simple random sample without replacement via partial Fisher-Yates.
/// Requires 2 <= n <= N (UsageError otherwise).
SampleDraw srswor(const PairedPopulation& pop, std::size_t n, Rng& rng);
SampleDraw srswor(const PairedPopulation& pop, std::size_t n, std::uint64_t stream_seed);

/// C(N, n), or cap + 1 as soon as the running value exceeds `cap`.
std::uint64_t binomial_capped(std::uint64_t N, std::uint64_t n, std::uint64_t cap);

/// Calls `visit` once for every size-n subset, in lexicographic index order.
/// Throws UsageError when C(N, n) exceeds `cap`.
void for_each_sample(const PairedPopulation& pop, std::size_t n,
                     const std::function<void(const SampleDraw&)>& visit,
                     std::uint64_t cap = kDefaultEnumerationCap);

std::vector<SampleDraw> enumerate_samples(const PairedPopulation& pop, std::size_t n,
                                          std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace modeest
