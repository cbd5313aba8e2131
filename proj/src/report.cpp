#include "modeest/report.hpp"

#include <cstdio>
#include <sstream>

#include "modeest/error.hpp"

namespace modeest {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json envelope(std::string_view kind, const json& manifest, json results) {
  json doc = json::object();
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = std::string(kind);
  doc["manifest"] = manifest;
  doc["results"] = std::move(results);
  return doc;
}

json variable_json(const VariableSummary& v) {
  return {{"min", v.min},       {"lower_quartile", v.lower_quartile}, {"median", v.median},
          {"mean", v.mean},     {"upper_quartile", v.upper_quartile}, {"max", v.max}};
}

json moments_json(const ModeMomentSet& mm) {
  return {{"n", mm.n},
          {"f", mm.f},
          {"var_mode_y", mm.var_mode_y},
          {"var_mode_x", mm.var_mode_x},
          {"cov_modes", mm.cov_modes},
          {"rho", opt(mm.rho)},
          {"cv_y", mm.cv_y},
          {"cv_x", mm.cv_x}};
}

json theory_report_json(const TheoryReport& r) {
  json j = {{"n", r.n},
            {"l1", r.scalars.l1},
            {"k1", r.scalars.k1},
            {"moments", moments_json(r.moments)},
            {"median_variance_y", r.median_variance_y},
            {"mse_naive", r.mse_naive},
            {"mse_ratio", r.mse_ratio},
            {"mse_product", r.mse_product},
            {"mse_tr", r.mse_tr},
            {"mse_tp", r.mse_tp},
            {"bias_ratio", r.bias_ratio},
            {"bias_product", r.bias_product},
            {"bias_tr", r.bias_tr},
            {"bias_tp", r.bias_tp},
            {"L1_opt", r.optimum.l1},
            {"K1_opt", r.optimum.k1},
            {"mse_tr_opt", r.optimal.mse_tr_opt},
            {"mse_tp_opt", r.optimal.mse_tp_opt},
            {"mse_opt_closed_form", r.optimal.closed_form},
            {"mse_tp_opt_printed_form", r.optimal.printed_tp_closed_form},
            {"re_ratio", opt(r.re_ratio)},
            {"re_product", opt(r.re_product)},
            {"re_tr", opt(r.re_tr)},
            {"re_tp", opt(r.re_tp)},
            {"re_tr_opt", opt(r.re_tr_opt)}};
  if (r.conditions) {
    j["efficiency_conditions"] = {{"vs_naive", r.conditions->vs_naive},
                                  {"vs_ratio", r.conditions->vs_ratio},
                                  {"naive_threshold", r.conditions->naive_threshold},
                                  {"ratio_threshold", r.conditions->ratio_threshold}};
  } else {
    j["efficiency_conditions"] = nullptr;
  }
  return j;
}

json simulation_results(const SimReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json estimators = json::array();
    for (const auto which : kAllEstimators) {
      const auto& s = row[which];
      estimators.push_back({{"name", std::string(estimator_name(which))},
                            {"sim_mse", s.sim_mse},
                            {"arb", opt(s.arb)},
                            {"re_percent", opt(s.re_percent)},
                            {"exact_mse", s.exact_mse},
                            {"exact_over_sim_ratio", opt(s.exact_over_sim)},
                            {"coverage_percent", s.coverage_percent},
                            {"mean_estimate", s.mean_estimate},
                            {"quartiles",
                             {{"lower", s.quartiles.lower}, {"median", s.quartiles.median}, {"upper", s.quartiles.upper}}},
                            {"sim_ci", {{"lower", s.ci_lower}, {"upper", s.ci_upper}}}});
    }
    rows.push_back({{"n", row.n},
                    {"replications_used", row.replications_used},
                    {"excluded", row.excluded},
                    {"t_multiplier", row.t_multiplier},
                    {"estimators", std::move(estimators)}});
  }
  return {{"l1", report.scalars.l1},
          {"k1", report.scalars.k1},
          {"pop_mode_y", report.pop_mode_y},
          {"pop_mode_x", report.pop_mode_x},
          {"replications", report.replications},
          {"alpha", report.alpha},
          {"rows", std::move(rows)}};
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string cell(const json& v) {
  if (v.is_null()) return "NA";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return fixed4(v.get<double>());
  return v.get<std::string>();
}

void csv_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

json population_json(const PopulationTheory& t) {
  return {{"N", t.N},
          {"mean_y", t.mean_y},
          {"mean_x", t.mean_x},
          {"var_y", t.var_y},
          {"var_x", t.var_x},
          {"cov_yx", t.cov_yx},
          {"corr_yx", t.corr_yx()},
          {"median_y", t.median_y},
          {"median_x", t.median_x},
          {"mode_y", t.mode_y},
          {"mode_x", t.mode_x},
          {"density_y", t.density_y},
          {"density_x", t.density_x},
          {"density_method", std::string(t.density_method.name())},
          {"s_yMy", t.s_y_my},
          {"s_xMx", t.s_x_mx},
          {"s_yMx", t.s_y_mx},
          {"s_xMy", t.s_x_my},
          {"p_matrix", {{"P11", t.p.p11}, {"P12", t.p.p12}, {"P21", t.p.p21}, {"P22", t.p.p22}}},
          {"mode_ratio", t.mode_ratio}};
}

json summary_document(const SummaryStats& stats, const json& manifest) {
  return envelope("summary", manifest, {{"y", variable_json(stats.y)}, {"x", variable_json(stats.x)}});
}

json theory_document(const PopulationTheory& theory, const std::vector<TheoryReport>& reports,
                     const json& manifest) {
  json list = json::array();
  for (const auto& r : reports) list.push_back(theory_report_json(r));
  return envelope("theory", manifest, {{"population", population_json(theory)}, {"reports", std::move(list)}});
}

json simulation_document(const PopulationTheory& theory, const SimReport& report, const json& manifest) {
  json results = simulation_results(report);
  results["population"] = population_json(theory);
  return envelope("simulate", manifest, std::move(results));
}

json coverage_document(const PopulationTheory& theory, const CoverageReport& report, const json& manifest) {
  json results = simulation_results(report.simulation);
  results["population"] = population_json(theory);
  json exact = json::array();
  for (const auto& row : report.exact) {
    json estimators = json::array();
    for (const auto which : kAllEstimators) {
      const auto& e = row.estimators[static_cast<std::size_t>(which)];
      estimators.push_back({{"name", std::string(estimator_name(which))},
                            {"estimate", e.estimate},
                            {"lower", e.ci.lower},
                            {"upper", e.ci.upper},
                            {"level", e.ci.level},
                            {"df", e.ci.df}});
    }
    exact.push_back({{"n", row.n}, {"estimators", std::move(estimators)}});
  }
  results["exact_intervals"] = std::move(exact);
  return envelope("coverage", manifest, std::move(results));
}

json sweep_document(const PopulationTheory& theory, const SweepReport& report, const json& manifest) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"l1", p.l1},
                      {"exact_mse", opt(p.exact_mse)},
                      {"sim_mse", opt(p.sim_mse)},
                      {"excluded", p.excluded},
                      {"degenerate", p.degenerate},
                      {"is_optimum", p.is_optimum}});
  }
  return envelope("sweep", manifest,
                  {{"population", population_json(theory)},
                   {"n", report.n},
                   {"replications", report.replications},
                   {"L1_opt", report.l1_opt},
                   {"pop_mode_y", report.pop_mode_y},
                   {"reference",
                    {{"exact_naive", report.exact_naive},
                     {"sim_naive", report.sim_naive},
                     {"exact_ratio", report.exact_ratio},
                     {"sim_ratio", opt(report.sim_ratio)}}},
                   {"points", std::move(points)}});
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

std::string document_csv(const json& doc) {
  std::ostringstream out;
  out << "# manifest: " << doc.at("manifest").dump() << '\n';
  const std::string kind = doc.at("kind").get<std::string>();
  const json& res = doc.at("results");

  if (kind == "summary") {
    csv_row(out, {"variable", "min", "lower_quartile", "median", "mean", "upper_quartile", "max"});
    for (const char* var : {"y", "x"}) {
      const json& v = res.at(var);
      csv_row(out, {var, cell(v["min"]), cell(v["lower_quartile"]), cell(v["median"]), cell(v["mean"]),
                    cell(v["upper_quartile"]), cell(v["max"])});
    }
  } else if (kind == "theory") {
    csv_row(out, {"n", "l1", "k1", "var_mode_y", "var_mode_x", "cov_modes", "rho", "mse_naive", "mse_ratio",
                  "mse_product", "mse_tr", "mse_tp", "bias_tr", "bias_tp", "L1_opt", "K1_opt", "mse_tr_opt",
                  "mse_tp_opt", "re_ratio", "re_tr", "re_tr_opt", "tr_beats_naive", "tr_beats_ratio"});
    for (const auto& r : res.at("reports")) {
      const json& c = r["efficiency_conditions"];
      csv_row(out, {cell(r["n"]), cell(r["l1"]), cell(r["k1"]), cell(r["moments"]["var_mode_y"]),
                    cell(r["moments"]["var_mode_x"]), cell(r["moments"]["cov_modes"]), cell(r["moments"]["rho"]),
                    cell(r["mse_naive"]), cell(r["mse_ratio"]), cell(r["mse_product"]), cell(r["mse_tr"]),
                    cell(r["mse_tp"]), cell(r["bias_tr"]), cell(r["bias_tp"]), cell(r["L1_opt"]), cell(r["K1_opt"]),
                    cell(r["mse_tr_opt"]), cell(r["mse_tp_opt"]), cell(r["re_ratio"]), cell(r["re_tr"]),
                    cell(r["re_tr_opt"]), c.is_null() ? "NA" : cell(c["vs_naive"]),
                    c.is_null() ? "NA" : cell(c["vs_ratio"])});
    }
  } else if (kind == "simulate" || kind == "coverage") {
    csv_row(out, {"n", "estimator", "re_percent", "sim_mse", "arb", "exact_mse", "exact_over_sim_ratio",
                  "coverage_percent", "ci_lower", "ci_upper", "mean_estimate", "lower_quartile", "median",
                  "upper_quartile", "excluded"});
    for (const auto& row : res.at("rows")) {
      for (const auto& e : row.at("estimators")) {
        csv_row(out, {cell(row["n"]), cell(e["name"]), cell(e["re_percent"]), cell(e["sim_mse"]), cell(e["arb"]),
                      cell(e["exact_mse"]), cell(e["exact_over_sim_ratio"]), cell(e["coverage_percent"]),
                      cell(e["sim_ci"]["lower"]), cell(e["sim_ci"]["upper"]), cell(e["mean_estimate"]),
                      cell(e["quartiles"]["lower"]), cell(e["quartiles"]["median"]), cell(e["quartiles"]["upper"]),
                      cell(row["excluded"])});
      }
    }
    if (kind == "coverage") {
      out << "# exact intervals (replication 0 sample)\n";
      csv_row(out, {"n", "estimator", "estimate", "lower", "upper"});
      for (const auto& row : res.at("exact_intervals")) {
        for (const auto& e : row.at("estimators")) {
          csv_row(out, {cell(row["n"]), cell(e["name"]), cell(e["estimate"]), cell(e["lower"]), cell(e["upper"])});
        }
      }
    }
  } else if (kind == "sweep") {
    csv_row(out, {"l1", "exact_mse", "sim_mse", "excluded", "degenerate", "is_optimum"});
    for (const auto& p : res.at("points")) {
      csv_row(out, {cell(p["l1"]), cell(p["exact_mse"]), cell(p["sim_mse"]), cell(p["excluded"]),
                    cell(p["degenerate"]), cell(p["is_optimum"])});
    }
  } else {
    throw UsageError("unknown report kind '" + kind + "'");
  }
  return out.str();
}

}  // namespace modeest
