// modeest command-line front end. Talks to the library only through modeest.h.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modeest/modeest.h"

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

const char* kind_name(int code) {
  switch (code) {
    case 2: return "usage";
    case 3: return "data";
    case 4: return "numeric";
    default: return "internal";
  }
}

void check(modeest_status status) {
  if (status != MODEEST_OK) throw Failure{static_cast<int>(status), modeest_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{2, message}; }

struct Owned {
  char* text = nullptr;
  ~Owned() { modeest_string_free(text); }
};

struct Population {
  modeest_population* handle = nullptr;
  ~Population() { modeest_population_free(handle); }
};

struct Theory {
  modeest_theory* handle = nullptr;
  ~Theory() { modeest_theory_free(handle); }
};

struct Options {
  std::string input;
  std::string out;
  std::string n_list;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string l1 = "opt";
  std::string k1 = "opt";
  std::string density = "gamma";
  double bandwidth = 0.0;
  std::string grid;
  std::string format;
  unsigned threads = 1;

  std::size_t n_pop = 5000;
  double shape = 10.0;
  double scale = 0.667;
  double slope = 0.87;
  double intercept = 0.75;
  double noise_sd = 0.5;
};

std::vector<std::size_t> parse_n_list(const std::string& text) {
  if (text.empty()) usage("--n is required");
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      usage("--n: not an integer: '" + item + "'");
    }
    if (pos != item.size() || item.front() == '-') usage("--n: not an integer: '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) usage("--n is empty");
  return out;
}

double parse_number(const std::string& flag, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    usage(flag + ": expected 'opt' or a number, got '" + text + "'");
  }
  if (pos != text.size() || !std::isfinite(v)) usage(flag + ": expected 'opt' or a number, got '" + text + "'");
  return v;
}

std::vector<double> parse_grid(const std::string& text, json& resolved) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_number("--grid", item));
  if (parts.size() != 3) usage("--grid must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) usage("--grid needs step > 0 and stop >= start");
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > 1e6) usage("--grid has too many points");
  std::vector<double> grid;
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) grid.push_back(start + step * static_cast<double>(i));
  resolved = {{"start", start}, {"stop", stop}, {"step", step}, {"points", grid.size()}};
  return grid;
}

std::string resolve_format(const Options& o) {
  if (!o.format.empty()) return o.format;
  const auto dot = o.out.rfind('.');
  if (dot != std::string::npos && o.out.substr(dot) == ".csv") return "csv";
  return "json";
}

std::string digest_of(const std::string& path) {
  std::uint64_t h = 0;
  check(modeest_file_digest(path.c_str(), &h));
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
  return buf;
}

json manifest(const std::string& command, json parameters, std::optional<std::string> digest) {
  json m = {{"command", command}, {"parameters", std::move(parameters)}, {"tool_version", modeest_version()}};
  if (digest) m["input_digest"] = *digest;
  return m;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Failure{3, "cannot write " + o.out};
  file << text;
  if (!file) throw Failure{3, "write failed: " + o.out};
}

void load(const Options& o, Population& pop) {
  if (o.input.empty()) usage("--input is required");
  check(modeest_population_load_csv(o.input.c_str(), &pop.handle));
}

void build_theory(const Options& o, const Population& pop, Theory& theory, json& params) {
  modeest_density_kind kind{};
  if (o.density == "gamma") {
    kind = MODEEST_DENSITY_GAMMA;
  } else if (o.density == "kde") {
    kind = MODEEST_DENSITY_KDE;
  } else {
    usage("--density must be gamma or kde");
  }
  if (o.bandwidth < 0.0) usage("--bandwidth must be positive");
  params["density"] = o.density;
  if (kind == MODEEST_DENSITY_KDE && o.bandwidth > 0.0) params["bandwidth"] = o.bandwidth;
  check(modeest_theory_compute(pop.handle, kind, o.bandwidth, &theory.handle));
}

// Resolves --l1/--k1 to numbers so that "opt" and the explicit optimum give
// identical manifests.
void resolve_scalars(const Options& o, const Theory& theory, modeest_study_options& opts, json& params) {
  double l1_opt = 0.0, k1_opt = 0.0;
  check(modeest_theory_optimal_scalars(theory.handle, &l1_opt, &k1_opt));
  opts.l1_optimal = 0;
  opts.k1_optimal = 0;
  opts.l1 = o.l1 == "opt" ? l1_opt : parse_number("--l1", o.l1);
  opts.k1 = o.k1 == "opt" ? k1_opt : parse_number("--k1", o.k1);
  params["l1"] = opts.l1;
  params["k1"] = opts.k1;
}

modeest_format format_of(const std::string& f) {
  if (f == "json") return MODEEST_FORMAT_JSON;
  if (f == "csv") return MODEEST_FORMAT_CSV;
  usage("--format must be csv or json");
}

int run_generate(const Options& o) {
  if (o.out.empty()) usage("--out is required");
  modeest_generator_config cfg;
  modeest_generator_config_default(&cfg);
  cfg.population_size = o.n_pop;
  cfg.gamma_shape = o.shape;
  cfg.gamma_scale = o.scale;
  cfg.slope = o.slope;
  cfg.intercept = o.intercept;
  cfg.noise_sd = o.noise_sd;
  cfg.seed = o.seed;
  const json params = {{"n_pop", o.n_pop}, {"shape", o.shape},         {"scale", o.scale}, {"slope", o.slope},
                       {"intercept", o.intercept}, {"noise_sd", o.noise_sd}, {"seed", o.seed}};
  Population pop;
  check(modeest_population_generate(&cfg, &pop.handle));
  const auto m = manifest("generate", params, std::nullopt).dump();
  check(modeest_population_write_csv(pop.handle, o.out.c_str(), m.c_str()));
  return 0;
}

int run_summarize(const Options& o) {
  Population pop;
  load(o, pop);
  const auto fmt = resolve_format(o);
  const auto m = manifest("summarize", {{"format", fmt}}, digest_of(o.input)).dump();
  Owned text;
  check(modeest_summary_report(pop.handle, format_of(fmt), m.c_str(), &text.text));
  emit(o, text.text);
  return 0;
}

// Shared setup for theory / simulate / coverage / sweep.
struct Study {
  Population pop;
  Theory theory;
  modeest_study_options opts{};
  std::vector<std::size_t> sizes;
  json params = json::object();
  std::string format;
  std::string digest;
};

void prepare(const Options& o, Study& s, bool sampling) {
  load(o, s.pop);
  s.digest = digest_of(o.input);
  s.format = resolve_format(o);
  format_of(s.format);
  s.sizes = parse_n_list(o.n_list);
  modeest_study_options_default(&s.opts);
  s.opts.sample_sizes = s.sizes.data();
  s.opts.sample_size_count = s.sizes.size();
  s.opts.threads = o.threads;
  s.params["n"] = s.sizes;
  build_theory(o, s.pop, s.theory, s.params);
  resolve_scalars(o, s.theory, s.opts, s.params);
  if (sampling) {
    s.opts.replications = o.reps;
    s.opts.seed = o.seed;
    s.opts.alpha = o.alpha;
    s.params["reps"] = o.reps;
    s.params["seed"] = o.seed;
    s.params["alpha"] = o.alpha;
  }
  s.params["format"] = s.format;
}

int run_theory(const Options& o) {
  Study s;
  prepare(o, s, false);
  const auto m = manifest("theory", s.params, s.digest).dump();
  Owned text;
  check(modeest_theory_report(s.theory.handle, &s.opts, format_of(s.format), m.c_str(), &text.text));
  emit(o, text.text);
  return 0;
}

int run_simulate(const Options& o, bool coverage) {
  Study s;
  prepare(o, s, true);
  const auto m = manifest(coverage ? "coverage" : "simulate", s.params, s.digest).dump();
  Owned text;
  const auto fn = coverage ? modeest_coverage_report : modeest_simulate_report;
  check(fn(s.pop.handle, s.theory.handle, &s.opts, format_of(s.format), m.c_str(), &text.text));
  emit(o, text.text);
  return 0;
}

int run_sweep(const Options& o) {
  Study s;
  prepare(o, s, true);
  if (s.sizes.size() != 1) usage("sweep takes a single --n");
  if (o.grid.empty()) usage("--grid is required");
  s.params.erase("l1");
  s.params.erase("k1");
  s.params.erase("alpha");
  json resolved;
  const auto grid = parse_grid(o.grid, resolved);
  s.params["grid"] = resolved;
  const auto m = manifest("sweep", s.params, s.digest).dump();
  Owned text;
  check(modeest_sweep_report(s.pop.handle, s.theory.handle, &s.opts, grid.data(), grid.size(),
                             format_of(s.format), m.c_str(), &text.text));
  emit(o, text.text);
  return 0;
}

int run_report(const Options& o) {
  if (o.input.empty()) usage("--input is required");
  if (o.out.empty()) usage("--out is required");
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Failure{3, "cannot open " + o.input};
  std::ostringstream body;
  body << in.rdbuf();
  Owned names;
  check(modeest_render_report(body.str().c_str(), o.out.c_str(), &names.text));
  std::cout << names.text;
  return 0;
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population mode estimation under SRSWOR with auxiliary information"};
  app.set_version_flag("--version", std::string(modeest_version()));
  app.require_subcommand(1);
  Options o;

  auto add_input = [&](CLI::App* c) { c->add_option("--input", o.input, "Population CSV (y,x)"); };
  auto add_out = [&](CLI::App* c, const char* help) { c->add_option("--out", o.out, help); };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "csv or json (default: from --out extension, else json)")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_theory = [&](CLI::App* c) {
    c->add_option("--n", o.n_list, "Sample sizes, comma separated");
    c->add_option("--l1", o.l1, "Transformed-ratio scalar: opt or a number");
    c->add_option("--k1", o.k1, "Transformed-product scalar: opt or a number");
    c->add_option("--density", o.density, "Density at the median: gamma or kde");
    c->add_option("--bandwidth", o.bandwidth, "KDE bandwidth (default: Silverman)");
  };
  auto add_sampling = [&](CLI::App* c) {
    c->add_option("--reps", o.reps, "Replications per sample size");
    c->add_option("--seed", o.seed, "Base seed");
    c->add_option("--alpha", o.alpha, "Confidence level is 1 - alpha");
    c->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic population CSV");
  gen->add_option("--n-pop", o.n_pop, "Population size");
  gen->add_option("--shape", o.shape, "Gamma shape of x");
  gen->add_option("--scale", o.scale, "Gamma scale of x");
  gen->add_option("--slope", o.slope, "Slope of y on x");
  gen->add_option("--intercept", o.intercept, "Intercept of y on x");
  gen->add_option("--noise-sd", o.noise_sd, "Noise standard deviation");
  gen->add_option("--seed", o.seed, "Seed");
  add_out(gen, "Output CSV");

  auto* sum = app.add_subcommand("summarize", "Five-number summaries and means");
  add_input(sum);
  add_out(sum, "Output file (default stdout)");
  add_format(sum);

  auto* th = app.add_subcommand("theory", "Exact first-order theory per sample size");
  add_input(th);
  add_out(th, "Output file (default stdout)");
  add_format(th);
  add_theory(th);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study");
  auto* cov = app.add_subcommand("coverage", "Exact intervals and simulated coverage");
  for (auto* c : {sim, cov}) {
    add_input(c);
    add_out(c, "Output file (default stdout)");
    add_format(c);
    add_theory(c);
    add_sampling(c);
  }

  auto* sw = app.add_subcommand("sweep", "MSE of the transformed ratio estimator over an L1 grid");
  add_input(sw);
  add_out(sw, "Output file (default stdout)");
  add_format(sw);
  add_theory(sw);
  add_sampling(sw);
  sw->add_option("--grid", o.grid, "start:stop:step");

  auto* rep = app.add_subcommand("report", "Render a JSON report to SVG charts");
  rep->add_option("--input", o.input, "JSON report from simulate, coverage, or sweep");
  add_out(rep, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=2 kind=usage message=" << json(one_line(e.what())).dump() << '\n';
    return 2;
  }

  try {
    if (*gen) return run_generate(o);
    if (*sum) return run_summarize(o);
    if (*th) return run_theory(o);
    if (*sim) return run_simulate(o, false);
    if (*cov) return run_simulate(o, true);
    if (*sw) return run_sweep(o);
    if (*rep) return run_report(o);
    usage("no subcommand");
  } catch (const Failure& f) {
    std::cerr << "error: code=" << f.code << " kind=" << kind_name(f.code)
              << " message=" << json(one_line(f.message)).dump() << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: code=5 kind=internal message=" << json(one_line(e.what())).dump() << '\n';
    return 5;
  }
}
