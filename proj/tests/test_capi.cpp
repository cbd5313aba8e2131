#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modeest/modeest.h"

namespace fs = std::filesystem;

namespace {

struct Text {
  char* p = nullptr;
  ~Text() { modeest_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

modeest_population* generated(std::uint64_t seed, size_t N = 2000) {
  modeest_generator_config cfg;
  modeest_generator_config_default(&cfg);
  cfg.population_size = N;
  cfg.seed = seed;
  modeest_population* pop = nullptr;
  REQUIRE(modeest_population_generate(&cfg, &pop) == MODEEST_OK);
  return pop;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("modeest_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("version and defaults") {
    CHECK(std::string(modeest_version()).size() > 0);
    modeest_generator_config g;
    modeest_generator_config_default(&g);
    CHECK(g.population_size == 5000);
    CHECK(g.gamma_shape == 10.0);
    CHECK(g.gamma_scale == 0.667);
    modeest_study_options o;
    modeest_study_options_default(&o);
    CHECK(o.replications == 10000);
    CHECK(o.alpha == 0.05);
    CHECK(o.l1_optimal);
    modeest_population_free(nullptr);
    modeest_theory_free(nullptr);
    modeest_string_free(nullptr);
  }

  TEST_CASE("status codes and messages") {
    modeest_population* pop = nullptr;
    CHECK(modeest_population_load_csv("/nonexistent/file.csv", &pop) == MODEEST_ERR_DATA);
    CHECK(std::string(modeest_last_error()).find("cannot open") != std::string::npos);
    CHECK(pop == nullptr);
    CHECK(modeest_population_load_csv(nullptr, &pop) == MODEEST_ERR_USAGE);

    const double y[3] = {1, 2, 3}, x[3] = {1, 2, 3};
    CHECK(modeest_population_from_arrays(y, x, 3, &pop) == MODEEST_ERR_DATA);
    CHECK(std::string(modeest_last_error()).find("too small") != std::string::npos);

    modeest_generator_config g;
    modeest_generator_config_default(&g);
    g.gamma_scale = -1;
    CHECK(modeest_population_generate(&g, &pop) == MODEEST_ERR_USAGE);

    // A population whose auxiliary mode varies wildly: sample denominators
    // cross zero and the study stops with a numeric error.
    std::vector<double> yy, xx;
    for (int i = 0; i < 40; ++i) {
      yy.push_back(i % 7 + 1.0);
      xx.push_back(i % 2 ? 10.0 + i : -10.0 - i);
    }
    REQUIRE(modeest_population_from_arrays(yy.data(), xx.data(), yy.size(), &pop) == MODEEST_OK);
    modeest_theory* th = nullptr;
    REQUIRE(modeest_theory_compute(pop, MODEEST_DENSITY_KDE, 0, &th) == MODEEST_OK);
    size_t n = 5;
    modeest_study_options o;
    modeest_study_options_default(&o);
    o.sample_sizes = &n;
    o.sample_size_count = 1;
    o.replications = 2000;
    o.l1_optimal = 0;
    o.l1 = 0;
    Text out;
    CHECK(modeest_simulate_report(pop, th, &o, MODEEST_FORMAT_JSON, nullptr, &out.p) == MODEEST_ERR_NUMERIC);
    CHECK(out.p == nullptr);
    CHECK(modeest_theory_compute(pop, MODEEST_DENSITY_GAMMA, 0, &th) == MODEEST_ERR_DATA);
    modeest_theory_free(th);
    modeest_population_free(pop);
  }

  TEST_CASE("population accessors and csv round trip") {
    auto* pop = generated(5, 300);
    CHECK(modeest_population_size(pop) == 300);
    std::vector<double> y(300), x(300);
    REQUIRE(modeest_population_values(pop, y.data(), x.data(), 300) == MODEEST_OK);

    const auto dir = scratch("csv");
    const auto path = (dir / "pop.csv").string();
    REQUIRE(modeest_population_write_csv(pop, path.c_str(), "{\"command\":\"test\"}") == MODEEST_OK);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# manifest: {\"command\":\"test\"}");

    modeest_population* back = nullptr;
    REQUIRE(modeest_population_load_csv(path.c_str(), &back) == MODEEST_OK);
    std::vector<double> y2(300), x2(300);
    modeest_population_values(back, y2.data(), x2.data(), 300);
    CHECK(y == y2);
    CHECK(x == x2);

    uint64_t d1 = 0, d2 = 0;
    CHECK(modeest_file_digest(path.c_str(), &d1) == MODEEST_OK);
    CHECK(modeest_file_digest(path.c_str(), &d2) == MODEEST_OK);
    CHECK(d1 == d2);
    CHECK(modeest_population_write_csv(pop, path.c_str(), "[1]") == MODEEST_ERR_USAGE);

    modeest_variable_summary sy, sx;
    REQUIRE(modeest_summarize(pop, &sy, &sx) == MODEEST_OK);
    CHECK(sy.min <= sy.lower_quartile);
    CHECK(sx.upper_quartile <= sx.max);
    modeest_population_free(back);
    modeest_population_free(pop);
  }

  TEST_CASE("theory through the C interface") {
    auto* pop = generated(8, 5000);
    modeest_theory* th = nullptr;
    REQUIRE(modeest_theory_compute(pop, MODEEST_DENSITY_GAMMA, 0, &th) == MODEEST_OK);
    modeest_population_theory t;
    REQUIRE(modeest_theory_get(th, &t) == MODEEST_OK);
    CHECK(t.N == 5000);
    CHECK(t.mode_y == doctest::Approx(3 * t.median_y - 2 * t.mean_y));
    CHECK(t.p11 + t.p12 + t.p21 + t.p22 == doctest::Approx(1.0));

    double l1 = 0, k1 = 0;
    REQUIRE(modeest_theory_optimal_scalars(th, &l1, &k1) == MODEEST_OK);
    modeest_mode_moments m;
    REQUIRE(modeest_theory_mode_moments(th, 151, &m) == MODEEST_OK);
    CHECK(l1 == doctest::Approx(t.mode_y * m.var_mode_x / m.cov_modes - t.mode_x).epsilon(1e-12));
    CHECK(k1 == doctest::Approx(-t.mode_y * m.var_mode_x / m.cov_modes - t.mode_x).epsilon(1e-12));
    CHECK(modeest_theory_mode_moments(th, 0, &m) == MODEEST_ERR_USAGE);
    REQUIRE(modeest_theory_mode_moments(th, 5000, &m) == MODEEST_OK);
    CHECK(std::isnan(m.rho));

    modeest_theory* kde = nullptr;
    REQUIRE(modeest_theory_compute(pop, MODEEST_DENSITY_KDE, 0.3, &kde) == MODEEST_OK);
    modeest_population_theory tk;
    modeest_theory_get(kde, &tk);
    CHECK(tk.density_y != t.density_y);
    CHECK(modeest_theory_compute(pop, static_cast<modeest_density_kind>(7), 0, &kde) == MODEEST_ERR_USAGE);
    modeest_theory_free(kde);
    modeest_theory_free(th);
    modeest_population_free(pop);
  }

  TEST_CASE("optimal and explicit scalars give the same report") {
    auto* pop = generated(8, 3000);
    modeest_theory* th = nullptr;
    REQUIRE(modeest_theory_compute(pop, MODEEST_DENSITY_GAMMA, 0, &th) == MODEEST_OK);
    double l1 = 0, k1 = 0;
    modeest_theory_optimal_scalars(th, &l1, &k1);
    size_t sizes[2] = {51, 151};
    modeest_study_options o;
    modeest_study_options_default(&o);
    o.sample_sizes = sizes;
    o.sample_size_count = 2;
    o.replications = 300;
    o.seed = 9;
    Text a, b;
    REQUIRE(modeest_simulate_report(pop, th, &o, MODEEST_FORMAT_CSV, "{}", &a.p) == MODEEST_OK);
    o.l1_optimal = o.k1_optimal = 0;
    o.l1 = l1;
    o.k1 = k1;
    o.threads = 3;
    REQUIRE(modeest_simulate_report(pop, th, &o, MODEEST_FORMAT_CSV, "{}", &b.p) == MODEEST_OK);
    CHECK(a.str() == b.str());

    Text theory_json;
    REQUIRE(modeest_theory_report(th, &o, MODEEST_FORMAT_JSON, nullptr, &theory_json.p) == MODEEST_OK);
    const auto doc = nlohmann::json::parse(theory_json.str());
    CHECK(doc["kind"] == "theory");
    CHECK(doc["results"]["reports"][1]["L1_opt"].get<double>() == l1);
    CHECK(modeest_theory_report(th, &o, MODEEST_FORMAT_JSON, "not json", &theory_json.p) == MODEEST_ERR_DATA);
    modeest_theory_free(th);
    modeest_population_free(pop);
  }

  TEST_CASE("render writes all charts or nothing") {
    auto* pop = generated(3, 1500);
    modeest_theory* th = nullptr;
    REQUIRE(modeest_theory_compute(pop, MODEEST_DENSITY_GAMMA, 0, &th) == MODEEST_OK);
    size_t n = 51;
    modeest_study_options o;
    modeest_study_options_default(&o);
    o.sample_sizes = &n;
    o.sample_size_count = 1;
    o.replications = 200;
    const double grid[3] = {0.0, 2.0, 4.0};
    Text sweep, cov;
    REQUIRE(modeest_sweep_report(pop, th, &o, grid, 3, MODEEST_FORMAT_JSON, "{}", &sweep.p) == MODEEST_OK);
    REQUIRE(modeest_coverage_report(pop, th, &o, MODEEST_FORMAT_JSON, "{}", &cov.p) == MODEEST_OK);

    const auto dir = scratch("render");
    Text names;
    REQUIRE(modeest_render_report(sweep.str().c_str(), (dir / "a").string().c_str(), &names.p) == MODEEST_OK);
    CHECK(names.str() == "sweep_mse.svg\n");
    REQUIRE(modeest_render_report(cov.str().c_str(), (dir / "b").string().c_str(), nullptr) == MODEEST_OK);
    CHECK(fs::exists(dir / "b" / "ci_ladder.svg"));
    CHECK(fs::exists(dir / "b" / "coverage_bars.svg"));

    auto doc = nlohmann::json::parse(cov.str());
    doc["results"]["rows"][0]["estimators"] = nlohmann::json::array();
    CHECK(modeest_render_report(doc.dump().c_str(), (dir / "c").string().c_str(), nullptr) == MODEEST_ERR_DATA);
    CHECK_FALSE(fs::exists(dir / "c"));
    CHECK(modeest_render_report("{oops", (dir / "d").string().c_str(), nullptr) == MODEEST_ERR_DATA);
    CHECK_FALSE(fs::exists(dir / "d"));
    fs::remove_all(dir);
    modeest_theory_free(th);
    modeest_population_free(pop);
  }
}
