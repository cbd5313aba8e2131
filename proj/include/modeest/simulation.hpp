#pragma once

// Monte Carlo study of the mode estimators under SRSWOR.
//
// Replication k at sample size n draws its sample from the stream
// derive_stream(base_seed, n, k). Per-replication results land in a slot
// indexed by k and are reduced in index order afterwards, so reports do not
// depend on the thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "modeest/dataset.hpp"
#include "modeest/estimators.hpp"
#include "modeest/theory.hpp"

namespace modeest {

/// Requested scalars; an empty optional selects the population optimum.
struct ScalarSpec {
  std::optional<double> l1;
  std::optional<double> k1;

  ScalarChoice resolve(const PopulationTheory& theory) const;
};

struct SimConfig {
  std::size_t replications = 10000;
  std::vector<std::size_t> sample_sizes;
  std::uint64_t base_seed = 0;
  double alpha = 0.05;
  ScalarSpec scalars;
  unsigned threads = 1;  ///< execution only; never changes results

  void validate(std::size_t population_size) const;
};

/// Replications whose ratio denominators cross zero are dropped; more than
/// this share of M aborts the run.
inline constexpr double kMaxExcludedShare = 0.001;

struct EstimatorSummary {
  double sim_mse = 0.0;                 ///< (1/M) sum (est - Ytilde)^2
  std::optional<double> arb;            ///< |mean(est - Ytilde)| / |Ytilde|
  std::optional<double> re_percent;     ///< 100 sum(naive dev^2) / sum(est dev^2)
  double exact_mse = 0.0;               ///< first-order formula at this n
  std::optional<double> exact_over_sim; ///< exact_mse / sim_mse
  double coverage_percent = 0.0;        ///< share of CIs est -/+ t sqrt(exact_mse) holding Ytilde
  double mean_estimate = 0.0;
  Quartiles quartiles;                  ///< of the M estimates
  double ci_lower = 0.0;                ///< mean simulated CI endpoints
  double ci_upper = 0.0;
};

struct SampleSizeResult {
  std::size_t n = 0;
  std::size_t replications_used = 0;
  std::size_t excluded = 0;
  double t_multiplier = 0.0;  ///< t_{n-1}(1 - alpha/2)
  std::array<EstimatorSummary, kEstimatorCount> estimators{};

  const EstimatorSummary& operator[](Estimator e) const { return estimators[static_cast<std::size_t>(e)]; }
};

struct SimReport {
  ScalarChoice scalars;
  double pop_mode_y = 0.0;
  double pop_mode_x = 0.0;
  std::size_t replications = 0;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;
  std::vector<SampleSizeResult> rows;
};

SimReport run_simulation(const PairedPopulation& pop, const PopulationTheory& theory, const SimConfig& cfg);

/// One sample's estimate with its exact-MSE interval.
struct ExactInterval {
  double estimate = 0.0;
  ConfidenceInterval ci;
};

struct ExactIntervalRow {
  std::size_t n = 0;
  std::array<ExactInterval, kEstimatorCount> estimators{};
};

struct CoverageReport {
  SimReport simulation;  ///< coverage, mean CI endpoints, quartiles
  /// Intervals around the estimates from replication 0 at each n.
  std::vector<ExactIntervalRow> exact;
};

CoverageReport coverage_study(const PairedPopulation& pop, const PopulationTheory& theory, const SimConfig& cfg);

struct SweepPoint {
  double l1 = 0.0;
  std::optional<double> exact_mse;
  std::optional<double> sim_mse;
  std::size_t excluded = 0;
  bool degenerate = false;  ///< X + L1 = 0, or too many sample denominators crossed zero
  bool is_optimum = false;
};

struct SweepReport {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t base_seed = 0;
  double l1_opt = 0.0;
  double pop_mode_y = 0.0;
  double exact_naive = 0.0;
  double sim_naive = 0.0;
  double exact_ratio = 0.0;
  std::optional<double> sim_ratio;
  std::vector<SweepPoint> points;  ///< sorted by l1; contains 0 and l1_opt
};

/// Exact and simulated MSE of the transformed ratio estimator over a grid of
/// L1 values. Every grid point reuses the same M samples.
SweepReport scalar_sweep(const PairedPopulation& pop, const PopulationTheory& theory, std::size_t n,
                         std::vector<double> grid, std::size_t replications, std::uint64_t seed,
                         unsigned threads = 1);

/// Exact design MSE and bias over all C(N, n) equally likely samples.
struct EnumerationResult {
  std::uint64_t samples = 0;
  std::uint64_t excluded = 0;
  std::array<BiasMse, kEstimatorCount> estimators{};

  const BiasMse& operator[](Estimator e) const { return estimators[static_cast<std::size_t>(e)]; }
};

EnumerationResult enumeration_oracle(const PairedPopulation& pop, std::size_t n, ScalarChoice scalars,
                                     std::uint64_t cap = kDefaultEnumerationCap);

/// Stream seed for replication k at sample size n.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, std::size_t k) noexcept;

}  // namespace modeest
