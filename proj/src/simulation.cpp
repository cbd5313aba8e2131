#include "modeest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "modeest/error.hpp"
#include "modeest/rng.hpp"

namespace modeest {

namespace {

// Splits [0, count) into contiguous chunks, one per worker. The first
// exception thrown by any worker is rethrown on the caller's thread.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Replication {
  double mode_y = 0.0;
  double mode_x = 0.0;
};

std::vector<Replication> draw_replications(const PairedPopulation& pop, std::size_t n, std::size_t replications,
                                           std::uint64_t base_seed, unsigned threads) {
  std::vector<Replication> out(replications);
  parallel_chunks(replications, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const SampleDraw draw = srswor(pop, n, replication_seed(base_seed, n, k));
      const SampleMoments sm = SampleMoments::from(draw);
      out[k] = {sm.mode_y, sm.mode_x};
    }
  });
  return out;
}

void check_excluded(std::size_t excluded, std::size_t replications, std::size_t n) {
  if (static_cast<double>(excluded) > kMaxExcludedShare * static_cast<double>(replications)) {
    throw NumericError("n=" + std::to_string(n) + ": " + std::to_string(excluded) + " of " +
                       std::to_string(replications) +
                       " replications had a ratio denominator crossing zero (limit 0.1%)");
  }
}

std::array<double, kEstimatorCount> exact_mses(const PopulationTheory& theory, std::size_t n, ScalarChoice s) {
  const ModeMomentSet mm = mode_moments(theory, n);
  return {mm.var_mode_y, mse_naive_ratio(mm, theory), mse_naive_product(mm, theory),
          transformed_ratio_theory(mm, theory, s.l1).mse, transformed_product_theory(mm, theory, s.k1).mse};
}

void check_product_denominators(const PopulationTheory& theory, ScalarChoice s) {
  if (theory.mode_x == 0.0) throw NumericError("population auxiliary mode is zero");
  if (theory.mode_x + s.k1 == 0.0) throw NumericError("X + K1 vanishes");
  if (theory.mode_x + s.l1 == 0.0) throw NumericError("X + L1 vanishes");
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, std::size_t k) noexcept {
  return derive_stream(base_seed, n, k);
}

ScalarChoice ScalarSpec::resolve(const PopulationTheory& theory) const {
  if (l1 && k1) return {*l1, *k1};
  const ScalarChoice opt = optimal_scalars(theory);
  return {l1 ? *l1 : opt.l1, k1 ? *k1 : opt.k1};
}

void SimConfig::validate(std::size_t population_size) const {
  if (replications < 1) throw UsageError("replications must be at least 1");
  if (sample_sizes.empty()) throw UsageError("no sample sizes given");
  for (const auto n : sample_sizes) {
    if (n < 2 || n > population_size) {
      throw UsageError("sample size n=" + std::to_string(n) + " outside [2, " + std::to_string(population_size) +
                       "]");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (scalars.l1 && !std::isfinite(*scalars.l1)) throw UsageError("L1 must be finite");
  if (scalars.k1 && !std::isfinite(*scalars.k1)) throw UsageError("K1 must be finite");
}

SimReport run_simulation(const PairedPopulation& pop, const PopulationTheory& theory, const SimConfig& cfg) {
  cfg.validate(pop.size());
  if (theory.N != pop.size()) throw UsageError("theory was computed for a different population");
  const ScalarChoice scalars = cfg.scalars.resolve(theory);
  check_product_denominators(theory, scalars);

  SimReport report;
  report.scalars = scalars;
  report.pop_mode_y = theory.mode_y;
  report.pop_mode_x = theory.mode_x;
  report.replications = cfg.replications;
  report.alpha = cfg.alpha;
  report.base_seed = cfg.base_seed;

  const double truth = theory.mode_y;
  const std::size_t M = cfg.replications;

  for (const std::size_t n : cfg.sample_sizes) {
    const auto reps = draw_replications(pop, n, M, cfg.base_seed, cfg.threads);
    const auto exact = exact_mses(theory, n, scalars);

    // Estimates per estimator, excluded replications removed, index order kept.
    std::array<std::vector<double>, kEstimatorCount> est;
    for (auto& v : est) v.reserve(M);
    std::size_t excluded = 0;
    for (const auto& r : reps) {
      if (!ratio_denominator_ok(r.mode_x, theory.mode_x, 0.0) ||
          !ratio_denominator_ok(r.mode_x, theory.mode_x, scalars.l1)) {
        ++excluded;
        continue;
      }
      SampleMoments sm;
      sm.mode_y = r.mode_y;
      sm.mode_x = r.mode_x;
      const EstimateSet e = estimate_all(sm, theory.mode_x, scalars);
      for (const auto which : kAllEstimators) est[static_cast<std::size_t>(which)].push_back(e[which]);
    }
    check_excluded(excluded, M, n);

    SampleSizeResult row;
    row.n = n;
    row.excluded = excluded;
    row.replications_used = M - excluded;
    row.t_multiplier = t_quantile(static_cast<double>(n - 1), 1.0 - cfg.alpha / 2.0);
    const double used = static_cast<double>(row.replications_used);

    std::array<double, kEstimatorCount> sum_sq{};
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      EstimatorSummary& s = row.estimators[e];
      const auto& values = est[e];
      const double half = row.t_multiplier * std::sqrt(exact[e]);
      double sum = 0.0;
      double sum_dev = 0.0;
      double sq = 0.0;
      std::size_t covered = 0;
      for (const double v : values) {
        const double dev = v - truth;
        sum += v;
        sum_dev += dev;
        sq += dev * dev;
        if (v - half <= truth && truth <= v + half) ++covered;
      }
      sum_sq[e] = sq;
      s.sim_mse = sq / used;
      s.mean_estimate = sum / used;
      if (truth != 0.0) s.arb = std::fabs(sum_dev / used) / std::fabs(truth);
      s.exact_mse = exact[e];
      if (s.sim_mse > 0.0) s.exact_over_sim = exact[e] / s.sim_mse;
      s.coverage_percent = 100.0 * static_cast<double>(covered) / used;
      s.ci_lower = s.mean_estimate - half;
      s.ci_upper = s.mean_estimate + half;
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      s.quartiles = tukey_quartiles(sorted);
    }
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      if (e == static_cast<std::size_t>(Estimator::Naive)) {
        row.estimators[e].re_percent = 100.0;
      } else if (sum_sq[e] > 0.0) {
        row.estimators[e].re_percent = 100.0 * sum_sq[0] / sum_sq[e];
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

CoverageReport coverage_study(const PairedPopulation& pop, const PopulationTheory& theory, const SimConfig& cfg) {
  CoverageReport out;
  out.simulation = run_simulation(pop, theory, cfg);
  const ScalarChoice scalars = out.simulation.scalars;
  for (const auto n : cfg.sample_sizes) {
    const auto exact = exact_mses(theory, n, scalars);
    const SampleDraw draw = srswor(pop, n, replication_seed(cfg.base_seed, n, 0));
    const EstimateSet e = estimate_all(draw, theory.mode_x, scalars);
    ExactIntervalRow row;
    row.n = n;
    for (const auto which : kAllEstimators) {
      const auto i = static_cast<std::size_t>(which);
      row.estimators[i] = {e[which], confidence_interval(e[which], exact[i], n, 1.0 - cfg.alpha)};
    }
    out.exact.push_back(row);
  }
  return out;
}

SweepReport scalar_sweep(const PairedPopulation& pop, const PopulationTheory& theory, std::size_t n,
                         std::vector<double> grid, std::size_t replications, std::uint64_t seed, unsigned threads) {
  if (grid.empty()) throw UsageError("sweep grid is empty");
  if (replications < 1) throw UsageError("replications must be at least 1");
  if (n < 2 || n > pop.size()) {
    throw UsageError("sample size n=" + std::to_string(n) + " outside [2, " + std::to_string(pop.size()) + "]");
  }
  for (const double l1 : grid) {
    if (!std::isfinite(l1)) throw UsageError("sweep grid contains a non-finite value");
  }
  if (theory.mode_x == 0.0) throw NumericError("population auxiliary mode is zero");

  const double l1_opt = optimal_scalars(theory).l1;
  grid.push_back(0.0);
  grid.push_back(l1_opt);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const ModeMomentSet mm = mode_moments(theory, n);
  const auto reps = draw_replications(pop, n, replications, seed, threads);
  const double truth = theory.mode_y;
  const double M = static_cast<double>(replications);

  SweepReport out;
  out.n = n;
  out.replications = replications;
  out.base_seed = seed;
  out.l1_opt = l1_opt;
  out.pop_mode_y = truth;
  out.exact_naive = mm.var_mode_y;
  out.exact_ratio = mse_naive_ratio(mm, theory);
  {
    double sq_naive = 0.0;
    double sq_ratio = 0.0;
    std::size_t ratio_ok = 0;
    for (const auto& r : reps) {
      sq_naive += (r.mode_y - truth) * (r.mode_y - truth);
      if (ratio_denominator_ok(r.mode_x, theory.mode_x, 0.0)) {
        const double t = r.mode_y * (theory.mode_x / r.mode_x);
        sq_ratio += (t - truth) * (t - truth);
        ++ratio_ok;
      }
    }
    out.sim_naive = sq_naive / M;
    if (static_cast<double>(replications - ratio_ok) <= kMaxExcludedShare * M) {
      out.sim_ratio = sq_ratio / static_cast<double>(ratio_ok);
    }
  }

  for (const double l1 : grid) {
    SweepPoint p;
    p.l1 = l1;
    p.is_optimum = l1 == l1_opt;
    if (theory.mode_x + l1 == 0.0) {
      p.degenerate = true;
      out.points.push_back(p);
      continue;
    }
    p.exact_mse = transformed_ratio_theory(mm, theory, l1).mse;
    double sq = 0.0;
    for (const auto& r : reps) {
      if (!ratio_denominator_ok(r.mode_x, theory.mode_x, l1)) {
        ++p.excluded;
        continue;
      }
      const double t = r.mode_y * ((theory.mode_x + l1) / (r.mode_x + l1));
      sq += (t - truth) * (t - truth);
    }
    if (static_cast<double>(p.excluded) > kMaxExcludedShare * M) {
      p.degenerate = true;
    } else {
      p.sim_mse = sq / static_cast<double>(replications - p.excluded);
    }
    out.points.push_back(p);
  }
  return out;
}

EnumerationResult enumeration_oracle(const PairedPopulation& pop, std::size_t n, ScalarChoice scalars,
                                     std::uint64_t cap) {
  const double truth = naive_mode(pop.y());
  const double pop_mode_x = naive_mode(pop.x());
  if (pop_mode_x == 0.0 || pop_mode_x + scalars.k1 == 0.0) {
    throw NumericError("enumeration: product denominator vanishes");
  }
  EnumerationResult out;
  std::array<double, kEstimatorCount> sum_dev{};
  std::array<double, kEstimatorCount> sum_sq{};
  for_each_sample(
      pop, n,
      [&](const SampleDraw& draw) {
        ++out.samples;
        const SampleMoments sm = SampleMoments::from(draw);
        if (!ratio_denominator_ok(sm.mode_x, pop_mode_x, 0.0) ||
            !ratio_denominator_ok(sm.mode_x, pop_mode_x, scalars.l1)) {
          ++out.excluded;
          return;
        }
        const EstimateSet e = estimate_all(sm, pop_mode_x, scalars);
        for (const auto which : kAllEstimators) {
          const auto i = static_cast<std::size_t>(which);
          const double dev = e[which] - truth;
          sum_dev[i] += dev;
          sum_sq[i] += dev * dev;
        }
      },
      cap);
  const double used = static_cast<double>(out.samples - out.excluded);
  if (used == 0.0) throw NumericError("enumeration: every sample was degenerate");
  for (std::size_t i = 0; i < kEstimatorCount; ++i) out.estimators[i] = {sum_dev[i] / used, sum_sq[i] / used};
  return out;
}

}  // namespace modeest
