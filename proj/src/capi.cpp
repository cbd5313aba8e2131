#include "modeest/modeest.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "modeest/dataset.hpp"
#include "modeest/error.hpp"
#include "modeest/report.hpp"
#include "modeest/simulation.hpp"
#include "modeest/theory.hpp"

struct modeest_population {
  modeest::PairedPopulation pop;
};

struct modeest_theory {
  modeest::PopulationTheory theory;
};

namespace {

thread_local std::string last_error;

template <class Fn>
modeest_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    last_error.clear();
    return MODEEST_OK;
  } catch (const modeest::Error& e) {
    last_error = e.what();
    return static_cast<modeest_status>(static_cast<int>(e.kind()));
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("json: ") + e.what();
    return MODEEST_ERR_DATA;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MODEEST_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MODEEST_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return MODEEST_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw modeest::UsageError(std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_manifest(const char* manifest_json) {
  if (manifest_json == nullptr) return nlohmann::json::object();
  auto m = nlohmann::json::parse(manifest_json);
  if (!m.is_object()) throw modeest::UsageError("manifest must be a JSON object");
  return m;
}

std::string render(const nlohmann::json& doc, modeest_format format) {
  switch (format) {
    case MODEEST_FORMAT_JSON: return modeest::dump_document(doc);
    case MODEEST_FORMAT_CSV: return modeest::document_csv(doc);
  }
  throw modeest::UsageError("unknown output format");
}

modeest::SimConfig sim_config(const modeest_study_options* opts) {
  require(opts, "options");
  modeest::SimConfig cfg;
  if (opts->sample_size_count > 0) require(opts->sample_sizes, "sample_sizes");
  cfg.sample_sizes.assign(opts->sample_sizes, opts->sample_sizes + opts->sample_size_count);
  cfg.replications = opts->replications;
  cfg.base_seed = opts->seed;
  cfg.alpha = opts->alpha;
  if (!opts->l1_optimal) cfg.scalars.l1 = opts->l1;
  if (!opts->k1_optimal) cfg.scalars.k1 = opts->k1;
  cfg.threads = opts->threads == 0 ? 1 : opts->threads;
  return cfg;
}

void copy_summary(const modeest::VariableSummary& s, modeest_variable_summary* out) {
  *out = {s.min, s.lower_quartile, s.median, s.mean, s.upper_quartile, s.max};
}

}  // namespace

extern "C" {

const char* modeest_version(void) { return MODEEST_VERSION; }

const char* modeest_last_error(void) { return last_error.c_str(); }

void modeest_string_free(char* s) { std::free(s); }

void modeest_generator_config_default(modeest_generator_config* cfg) {
  if (cfg == nullptr) return;
  const modeest::GeneratorConfig d;
  *cfg = {d.population_size, d.gamma_shape, d.gamma_scale, d.intercept, d.slope, d.noise_sd, d.seed};
}

modeest_status modeest_population_generate(const modeest_generator_config* cfg, modeest_population** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    modeest::GeneratorConfig g;
    g.population_size = cfg->population_size;
    g.gamma_shape = cfg->gamma_shape;
    g.gamma_scale = cfg->gamma_scale;
    g.intercept = cfg->intercept;
    g.slope = cfg->slope;
    g.noise_sd = cfg->noise_sd;
    g.seed = cfg->seed;
    *out = new modeest_population{modeest::generate_population(g)};
  });
}

modeest_status modeest_population_load_csv(const char* path, modeest_population** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new modeest_population{modeest::load_csv(path)};
  });
}

modeest_status modeest_population_from_arrays(const double* y, const double* x, size_t count,
                                              modeest_population** out) {
  return guarded([&] {
    require(y, "y");
    require(x, "x");
    require(out, "out");
    *out = new modeest_population{modeest::PairedPopulation({y, y + count}, {x, x + count})};
  });
}

void modeest_population_free(modeest_population* pop) { delete pop; }

size_t modeest_population_size(const modeest_population* pop) { return pop ? pop->pop.size() : 0; }

modeest_status modeest_population_values(const modeest_population* pop, double* y, double* x, size_t capacity) {
  return guarded([&] {
    require(pop, "population");
    const std::size_t count = std::min(capacity, pop->pop.size());
    for (std::size_t i = 0; i < count; ++i) {
      if (y) y[i] = pop->pop.y()[i];
      if (x) x[i] = pop->pop.x()[i];
    }
  });
}

modeest_status modeest_population_write_csv(const modeest_population* pop, const char* path,
                                            const char* manifest_json) {
  return guarded([&] {
    require(pop, "population");
    require(path, "path");
    std::ostringstream body;
    if (manifest_json) body << "# manifest: " << parse_manifest(manifest_json).dump() << '\n';
    modeest::write_csv(pop->pop, body);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw modeest::DataError(std::string("cannot write ") + path);
    file << body.str();
    if (!file) throw modeest::DataError(std::string("write failed: ") + path);
  });
}

modeest_status modeest_file_digest(const char* path, uint64_t* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw modeest::DataError(std::string("cannot open ") + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    *out = modeest::fnv1a64(buffer.str());
  });
}

modeest_status modeest_summarize(const modeest_population* pop, modeest_variable_summary* y,
                                 modeest_variable_summary* x) {
  return guarded([&] {
    require(pop, "population");
    const auto s = modeest::summarize(pop->pop);
    if (y) copy_summary(s.y, y);
    if (x) copy_summary(s.x, x);
  });
}

modeest_status modeest_theory_compute(const modeest_population* pop, modeest_density_kind density,
                                      double kde_bandwidth, modeest_theory** out) {
  return guarded([&] {
    require(pop, "population");
    require(out, "out");
    modeest::DensityMethod method;
    switch (density) {
      case MODEEST_DENSITY_GAMMA: method = modeest::DensityMethod::gamma_mle(); break;
      case MODEEST_DENSITY_KDE:
        method = modeest::DensityMethod::kde(kde_bandwidth > 0.0 ? std::optional<double>(kde_bandwidth)
                                                                 : std::nullopt);
        break;
      default: throw modeest::UsageError("unknown density method");
    }
    *out = new modeest_theory{modeest::compute_population_theory(pop->pop, method)};
  });
}

void modeest_theory_free(modeest_theory* theory) { delete theory; }

modeest_status modeest_theory_get(const modeest_theory* theory, modeest_population_theory* out) {
  return guarded([&] {
    require(theory, "theory");
    require(out, "out");
    const auto& t = theory->theory;
    *out = {t.N,      t.mean_y,    t.mean_x,    t.var_y,  t.var_x,  t.cov_yx, t.corr_yx(), t.median_y,
            t.median_x, t.mode_y,  t.mode_x,    t.density_y, t.density_x, t.s_y_my, t.s_x_mx, t.s_y_mx,
            t.s_x_my, t.p.p11,     t.p.p12,     t.p.p21,  t.p.p22,  t.mode_ratio};
  });
}

modeest_status modeest_theory_optimal_scalars(const modeest_theory* theory, double* l1, double* k1) {
  return guarded([&] {
    require(theory, "theory");
    const auto s = modeest::optimal_scalars(theory->theory);
    if (l1) *l1 = s.l1;
    if (k1) *k1 = s.k1;
  });
}

modeest_status modeest_theory_mode_moments(const modeest_theory* theory, size_t n, modeest_mode_moments* out) {
  return guarded([&] {
    require(theory, "theory");
    require(out, "out");
    const auto mm = modeest::mode_moments(theory->theory, n);
    *out = {mm.n, mm.f, mm.var_mode_y, mm.var_mode_x, mm.cov_modes,
            mm.rho ? *mm.rho : std::numeric_limits<double>::quiet_NaN(), mm.cv_y, mm.cv_x};
  });
}

void modeest_study_options_default(modeest_study_options* opts) {
  if (opts == nullptr) return;
  *opts = {};
  opts->replications = 10000;
  opts->alpha = 0.05;
  opts->l1_optimal = 1;
  opts->k1_optimal = 1;
  opts->threads = 1;
}

modeest_status modeest_summary_report(const modeest_population* pop, modeest_format format,
                                      const char* manifest_json, char** out) {
  return guarded([&] {
    require(pop, "population");
    require(out, "out");
    const auto doc = modeest::summary_document(modeest::summarize(pop->pop), parse_manifest(manifest_json));
    *out = copy_string(render(doc, format));
  });
}

modeest_status modeest_theory_report(const modeest_theory* theory, const modeest_study_options* opts,
                                     modeest_format format, const char* manifest_json, char** out) {
  return guarded([&] {
    require(theory, "theory");
    require(out, "out");
    const auto cfg = sim_config(opts);
    if (cfg.sample_sizes.empty()) throw modeest::UsageError("no sample sizes given");
    const auto scalars = cfg.scalars.resolve(theory->theory);
    std::vector<modeest::TheoryReport> reports;
    for (const auto n : cfg.sample_sizes) reports.push_back(modeest::theory_report(theory->theory, n, scalars));
    const auto doc = modeest::theory_document(theory->theory, reports, parse_manifest(manifest_json));
    *out = copy_string(render(doc, format));
  });
}

modeest_status modeest_simulate_report(const modeest_population* pop, const modeest_theory* theory,
                                       const modeest_study_options* opts, modeest_format format,
                                       const char* manifest_json, char** out) {
  return guarded([&] {
    require(pop, "population");
    require(theory, "theory");
    require(out, "out");
    const auto report = modeest::run_simulation(pop->pop, theory->theory, sim_config(opts));
    const auto doc = modeest::simulation_document(theory->theory, report, parse_manifest(manifest_json));
    *out = copy_string(render(doc, format));
  });
}

modeest_status modeest_coverage_report(const modeest_population* pop, const modeest_theory* theory,
                                       const modeest_study_options* opts, modeest_format format,
                                       const char* manifest_json, char** out) {
  return guarded([&] {
    require(pop, "population");
    require(theory, "theory");
    require(out, "out");
    const auto report = modeest::coverage_study(pop->pop, theory->theory, sim_config(opts));
    const auto doc = modeest::coverage_document(theory->theory, report, parse_manifest(manifest_json));
    *out = copy_string(render(doc, format));
  });
}

modeest_status modeest_sweep_report(const modeest_population* pop, const modeest_theory* theory,
                                    const modeest_study_options* opts, const double* grid, size_t grid_count,
                                    modeest_format format, const char* manifest_json, char** out) {
  return guarded([&] {
    require(pop, "population");
    require(theory, "theory");
    require(out, "out");
    const auto cfg = sim_config(opts);
    if (cfg.sample_sizes.empty()) throw modeest::UsageError("no sample size given");
    if (grid_count > 0) require(grid, "grid");
    const auto report = modeest::scalar_sweep(pop->pop, theory->theory, cfg.sample_sizes.front(),
                                              std::vector<double>(grid, grid + grid_count), cfg.replications,
                                              cfg.base_seed, cfg.threads);
    const auto doc = modeest::sweep_document(theory->theory, report, parse_manifest(manifest_json));
    *out = copy_string(render(doc, format));
  });
}

modeest_status modeest_render_report(const char* report_json, const char* out_dir, char** written) {
  return guarded([&] {
    require(report_json, "report_json");
    require(out_dir, "out_dir");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw modeest::DataError(std::string("malformed report: ") + e.what());
    }
    const auto files = modeest::render_svgs(doc);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw modeest::DataError("cannot create " + dir.string() + ": " + ec.message());
    std::string names;
    for (const auto& f : files) {
      std::ofstream file(dir / f.name, std::ios::binary | std::ios::trunc);
      if (!file) throw modeest::DataError("cannot write " + (dir / f.name).string());
      file << f.content;
      names += f.name + "\n";
    }
    if (written) *written = copy_string(names);
  });
}

}  // extern "C"
