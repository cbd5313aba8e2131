#include <doctest.h>

#include <regex>
#include <sstream>

#include "modeest/error.hpp"
#include "modeest/report.hpp"

using namespace modeest;
using nlohmann::json;

namespace {

struct Setup {
  PairedPopulation pop;
  PopulationTheory theory;
};

const Setup& setup() {
  static const Setup s = [] {
    GeneratorConfig g;
    g.population_size = 1500;
    g.seed = 31;
    auto pop = generate_population(g);
    auto theory = compute_population_theory(pop, DensityMethod::gamma_mle());
    return Setup{std::move(pop), std::move(theory)};
  }();
  return s;
}

json simulate_doc() {
  SimConfig cfg;
  cfg.replications = 500;
  cfg.sample_sizes = {51, 151};
  cfg.base_seed = 2;
  return coverage_document(setup().theory, coverage_study(setup().pop, setup().theory, cfg),
                           {{"command", "coverage"}});
}

json sweep_doc() {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 0.25 * i);
  return sweep_document(setup().theory, scalar_sweep(setup().pop, setup().theory, 151, grid, 300, 4),
                        {{"command", "sweep"}});
}

std::string attr(const std::string& svg, const std::string& element_class, const std::string& name) {
  const std::regex re("<[a-z]+ [^>]*class=\"" + element_class + "\"[^>]*>");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, re));
  const std::string tag = m.str();
  const std::regex ar(" " + name + "=\"([^\"]*)\"");
  std::smatch a;
  REQUIRE(std::regex_search(tag, a, ar));
  return a[1];
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("envelope") {
    const auto doc = summary_document(summarize(setup().pop), {{"command", "summarize"}});
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["kind"] == "summary");
    CHECK(doc["manifest"]["command"] == "summarize");
    CHECK(doc["results"]["y"]["median"].is_number());
    const auto text = dump_document(doc);
    CHECK(text.back() == '\n');
    CHECK(json::parse(text) == doc);
  }

  TEST_CASE("doubles round trip through json") {
    const auto doc = simulate_doc();
    const auto back = json::parse(dump_document(doc));
    CHECK(back["results"]["rows"][0]["estimators"][3]["sim_mse"].get<double>() ==
          doc["results"]["rows"][0]["estimators"][3]["sim_mse"].get<double>());
    CHECK(back["results"]["population"]["mode_y"].get<double>() == setup().theory.mode_y);
  }

  TEST_CASE("csv layout") {
    const auto csv = document_csv(simulate_doc());
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# manifest: {", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("n,estimator,re_percent,sim_mse,arb,exact_mse,exact_over_sim_ratio,coverage_percent", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("51,naive,100.0000,", 0) == 0);
    CHECK(csv.find("# exact intervals") != std::string::npos);

    const auto sweep = document_csv(sweep_doc());
    CHECK(sweep.find("\nl1,exact_mse,sim_mse,excluded,degenerate,is_optimum\n") != std::string::npos);

    json bad = simulate_doc();
    bad["kind"] = "nonsense";
    CHECK_THROWS_AS(document_csv(bad), UsageError);
  }

  TEST_CASE("missing values print as NA") {
    const auto pop = setup().pop;
    const auto theory = setup().theory;
    SimConfig cfg;
    cfg.replications = 20;
    cfg.sample_sizes = {pop.size()};
    const auto csv = document_csv(simulation_document(theory, run_simulation(pop, theory, cfg), json::object()));
    CHECK(csv.find("NA") != std::string::npos);
  }

  TEST_CASE("sweep chart marks the optimum") {
    const auto doc = sweep_doc();
    const auto files = render_svgs(doc);
    REQUIRE(files.size() == 1);
    CHECK(files[0].name == "sweep_mse.svg");
    const auto& svg = files[0].content;
    CHECK(std::stod(attr(svg, "opt-marker", "data-l1")) == doc["results"]["L1_opt"].get<double>());

    // The marker sits on the lowest vertex of the exact curve.
    const auto pts = attr(svg, "exact", "points");
    std::istringstream in(pts);
    std::string pair;
    double best_x = 0, best_y = -1;
    while (in >> pair) {
      const auto comma = pair.find(',');
      const double px = std::stod(pair.substr(0, comma)), py = std::stod(pair.substr(comma + 1));
      if (py > best_y) {
        best_y = py;
        best_x = px;
      }
    }
    CHECK(std::stod(attr(svg, "opt-marker", "x1")) == doctest::Approx(best_x).epsilon(1e-12));
    CHECK(svg.find("<desc>") != std::string::npos);
    CHECK(svg.find("width=\"800.00\"") != std::string::npos);
  }

  TEST_CASE("simulation charts") {
    const auto doc = simulate_doc();
    const auto files = render_svgs(doc);
    REQUIRE(files.size() == 2);
    CHECK(files[0].name == "ci_ladder.svg");
    CHECK(files[1].name == "coverage_bars.svg");
    const auto again = render_svgs(json::parse(dump_document(doc)));
    CHECK(files[0].content == again[0].content);
    CHECK(files[1].content == again[1].content);
  }

  TEST_CASE("malformed reports") {
    auto doc = simulate_doc();
    doc["results"]["rows"][0]["estimators"] = json::array();
    CHECK_THROWS_AS(render_svgs(doc), DataError);
    doc = simulate_doc();
    doc["results"]["rows"] = json::array();
    CHECK_THROWS_AS(render_svgs(doc), DataError);
    doc = sweep_doc();
    doc["results"]["points"] = json::array();
    CHECK_THROWS_AS(render_svgs(doc), DataError);
    doc["schema_version"] = 99;
    CHECK_THROWS_AS(render_svgs(doc), DataError);
    CHECK_THROWS_AS(render_svgs(json::array()), DataError);
    CHECK_THROWS_AS(render_svgs(summary_document(summarize(setup().pop), json::object())), DataError);
  }
}
