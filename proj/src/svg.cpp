// Static SVG 1.1 charts. Fixed canvas, text as <text> elements, coordinates
// printed with two decimals, no timestamps: identical input gives identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "modeest/error.hpp"
#include "modeest/report.hpp"

namespace modeest {

using nlohmann::json;

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double operator()(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
};

Axis make_axis(double lo, double hi, double pixel_lo, double pixel_hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.05;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, pixel_lo, pixel_hi};
}

class Canvas {
 public:
  Canvas(const std::string& title, const json& manifest) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth) << "\" height=\""
         << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
         << "<desc>" << xml_escape(manifest.dump()) << "</desc>\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
         << "\" fill=\"white\"/>\n";
    text(kWidth / 2, 28, title, "middle", 16);
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << "\">" << xml_escape(s) << "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1.0,
            const std::string& extra = "") {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"' << extra << "/>\n";
  }

  void raw(const std::string& s) { out_ << s; }

  void axes(const Axis& x, const Axis& y, const std::string& x_label, const std::string& y_label) {
    line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
    line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
    for (int i = 0; i <= 4; ++i) {
      const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
      const double yv = y.lo + (y.hi - y.lo) * i / 4.0;
      line(x(xv), kHeight - kBottom, x(xv), kHeight - kBottom + 5, "black");
      text(x(xv), kHeight - kBottom + 18, label(xv), "middle", 10);
      line(kLeft - 5, y(yv), kLeft, y(yv), "black");
      text(kLeft - 8, y(yv) + 3, label(yv), "end", 10);
    }
    text((kLeft + kWidth - kRight) / 2, kHeight - 15, x_label, "middle");
    out_ << "<text x=\"18\" y=\"" << num((kTop + kHeight - kBottom) / 2)
         << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
         << num((kTop + kHeight - kBottom) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

double number(const json& v, const char* what) {
  if (!v.is_number()) throw DataError(std::string("report: field ") + what + " is not a number");
  return v.get<double>();
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw DataError(std::string("report: missing field ") + key);
  return obj.at(key);
}

SvgFile sweep_chart(const json& doc) {
  const json& res = field(doc, "results");
  const json& points = field(res, "points");
  const double l1_opt = number(field(res, "L1_opt"), "L1_opt");
  if (!points.is_array() || points.empty()) throw DataError("report: sweep has no points");

  std::vector<std::pair<double, double>> exact;
  std::vector<std::pair<double, double>> sim;
  std::optional<double> exact_at_opt;
  for (const auto& p : points) {
    const double l1 = number(field(p, "l1"), "l1");
    if (!field(p, "exact_mse").is_null()) {
      const double e = number(p["exact_mse"], "exact_mse");
      exact.emplace_back(l1, e);
      if (l1 == l1_opt) exact_at_opt = e;
    }
    if (!field(p, "sim_mse").is_null()) sim.emplace_back(l1, number(p["sim_mse"], "sim_mse"));
  }
  if (exact.empty()) throw DataError("report: sweep has no finite exact MSE");

  double xlo = l1_opt;
  double xhi = l1_opt;
  double ylo = std::numeric_limits<double>::infinity();
  double yhi = -ylo;
  for (const auto* series : {&exact, &sim}) {
    for (const auto& [x, y] : *series) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  const Axis ax = make_axis(xlo, xhi, kLeft, kWidth - kRight);
  const Axis ay = make_axis(std::min(0.0, ylo), yhi, kHeight - kBottom, kTop);

  Canvas c("MSE of the transformed ratio estimator over L1", field(doc, "manifest"));
  c.axes(ax, ay, "L1", "MSE");
  const auto polyline = [&](const std::vector<std::pair<double, double>>& s, const char* color, const char* cls,
                            const char* dash) {
    std::string pts;
    for (const auto& [x, y] : s) {
      if (!pts.empty()) pts += ' ';
      pts += num(ax(x)) + "," + num(ay(y));
    }
    c.raw("<polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" + color +
          "\" stroke-width=\"2\"" + dash + " points=\"" + pts + "\"/>\n");
  };
  polyline(exact, kPalette[0], "exact", "");
  if (!sim.empty()) polyline(sim, kPalette[1], "simulated", " stroke-dasharray=\"6 4\"");

  const double mx = ax(l1_opt);
  c.line(mx, kTop, mx, kHeight - kBottom, "#c44e52", 1.0,
         " stroke-dasharray=\"3 3\" class=\"opt-marker\" data-l1=\"" + json(l1_opt).dump() + "\"");
  if (exact_at_opt) {
    c.raw("<circle class=\"opt-point\" cx=\"" + num(mx) + "\" cy=\"" + num(ay(*exact_at_opt)) +
          "\" r=\"4\" fill=\"#c44e52\"/>\n");
  }
  c.text(mx + 6, kTop + 12, "L1 opt = " + label(l1_opt));
  c.text(kWidth - kRight - 150, kTop + 12, "exact");
  c.line(kWidth - kRight - 175, kTop + 8, kWidth - kRight - 155, kTop + 8, kPalette[0], 2.0);
  c.text(kWidth - kRight - 150, kTop + 28, "simulated");
  c.line(kWidth - kRight - 175, kTop + 24, kWidth - kRight - 155, kTop + 24, kPalette[1], 2.0,
         " stroke-dasharray=\"6 4\"");
  return {"sweep_mse.svg", c.finish()};
}

struct Row {
  double n = 0.0;
  std::vector<std::string> names;
  std::vector<double> lower, upper, centre, coverage;
};

std::vector<Row> collect_rows(const json& doc) {
  const json& rows = field(field(doc, "results"), "rows");
  if (!rows.is_array() || rows.empty()) throw DataError("report: no sample-size rows");
  std::vector<Row> out;
  for (const auto& r : rows) {
    Row row;
    row.n = number(field(r, "n"), "n");
    const json& ests = field(r, "estimators");
    if (!ests.is_array() || ests.empty()) throw DataError("report: empty estimator list");
    for (const auto& e : ests) {
      row.names.push_back(field(e, "name").get<std::string>());
      const json& ci = field(e, "sim_ci");
      row.lower.push_back(number(field(ci, "lower"), "sim_ci.lower"));
      row.upper.push_back(number(field(ci, "upper"), "sim_ci.upper"));
      row.centre.push_back(number(field(e, "mean_estimate"), "mean_estimate"));
      row.coverage.push_back(number(field(e, "coverage_percent"), "coverage_percent"));
    }
    if (!out.empty() && out.front().names != row.names) throw DataError("report: estimator lists differ across n");
    out.push_back(std::move(row));
  }
  return out;
}

SvgFile ci_ladder(const json& doc, const std::vector<Row>& rows) {
  const double truth = number(field(field(doc, "results"), "pop_mode_y"), "pop_mode_y");
  double lo = truth;
  double hi = truth;
  for (const auto& r : rows) {
    lo = std::min(lo, *std::min_element(r.lower.begin(), r.lower.end()));
    hi = std::max(hi, *std::max_element(r.upper.begin(), r.upper.end()));
  }
  const std::size_t per_row = rows.front().names.size();
  const double slots = static_cast<double>(rows.size() * (per_row + 1));
  const Axis ax = make_axis(lo, hi, kLeft, kWidth - kRight - 120);
  const Axis ay{0.0, slots, kTop, kHeight - kBottom};

  Canvas c("Simulated confidence intervals by sample size", field(doc, "manifest"));
  c.line(kLeft, kHeight - kBottom, kWidth - kRight - 120, kHeight - kBottom, "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    c.line(ax(v), kHeight - kBottom, ax(v), kHeight - kBottom + 5, "black");
    c.text(ax(v), kHeight - kBottom + 18, label(v), "middle", 10);
  }
  c.text((kLeft + kWidth - kRight - 120) / 2, kHeight - 15, "estimate", "middle");
  c.line(ax(truth), kTop, ax(truth), kHeight - kBottom, "#999999", 1.0, " stroke-dasharray=\"4 3\"");

  double slot = 0.5;
  for (const auto& r : rows) {
    c.text(kLeft - 8, ay(slot + per_row / 2.0) + 3, "n=" + label(r.n), "end", 11);
    for (std::size_t e = 0; e < per_row; ++e) {
      const double y = ay(slot + static_cast<double>(e) + 0.5);
      const char* color = kPalette[e % 5];
      c.line(ax(r.lower[e]), y, ax(r.upper[e]), y, color, 2.0);
      c.raw("<circle cx=\"" + num(ax(r.centre[e])) + "\" cy=\"" + num(y) + "\" r=\"2.5\" fill=\"" + color +
            "\"/>\n");
    }
    slot += static_cast<double>(per_row + 1);
  }
  for (std::size_t e = 0; e < per_row; ++e) {
    const double y = kTop + 14.0 * static_cast<double>(e);
    c.line(kWidth - kRight - 115, y, kWidth - kRight - 100, y, kPalette[e % 5], 2.0);
    c.text(kWidth - kRight - 96, y + 4, rows.front().names[e], "start", 10);
  }
  return {"ci_ladder.svg", c.finish()};
}

SvgFile coverage_bars(const json& doc, const std::vector<Row>& rows) {
  const std::size_t per_row = rows.front().names.size();
  const double group = 1.0 / static_cast<double>(rows.size());
  const Axis ay{0.0, 100.0, kHeight - kBottom, kTop};
  const double plot_w = kWidth - kRight - 120 - kLeft;

  Canvas c("Coverage of simulated confidence intervals (%)", field(doc, "manifest"));
  c.line(kLeft, kHeight - kBottom, kWidth - kRight - 120, kHeight - kBottom, "black");
  c.line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = 25.0 * i;
    c.line(kLeft - 5, ay(v), kLeft, ay(v), "black");
    c.text(kLeft - 8, ay(v) + 3, label(v), "end", 10);
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    const double x0 = kLeft + plot_w * group * static_cast<double>(g);
    const double bar_w = plot_w * group / static_cast<double>(per_row + 1);
    for (std::size_t e = 0; e < per_row; ++e) {
      const double v = std::clamp(rows[g].coverage[e], 0.0, 100.0);
      const double x = x0 + bar_w * (static_cast<double>(e) + 0.5);
      c.raw("<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(ay(v)) + "\" width=\"" + num(bar_w) +
            "\" height=\"" + num(ay(0.0) - ay(v)) + "\" fill=\"" + kPalette[e % 5] + "\" data-coverage=\"" +
            json(rows[g].coverage[e]).dump() + "\"/>\n");
    }
    c.text(x0 + plot_w * group / 2, kHeight - kBottom + 18, "n=" + label(rows[g].n), "middle", 10);
  }
  for (std::size_t e = 0; e < per_row; ++e) {
    const double y = kTop + 14.0 * static_cast<double>(e);
    c.raw("<rect x=\"" + num(kWidth - kRight - 115) + "\" y=\"" + num(y - 5) + "\" width=\"10\" height=\"10\" fill=\"" +
          kPalette[e % 5] + "\"/>\n");
    c.text(kWidth - kRight - 100, y + 4, rows.front().names[e], "start", 10);
  }
  return {"coverage_bars.svg", c.finish()};
}

}  // namespace

std::vector<SvgFile> render_svgs(const json& doc) {
  if (!doc.is_object()) throw DataError("report: not a JSON object");
  const json& version = field(doc, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw DataError("report: unsupported schema_version");
  }
  const json& kind = field(doc, "kind");
  if (!kind.is_string()) throw DataError("report: kind is not a string");
  const std::string k = kind.get<std::string>();
  if (k == "sweep") return {sweep_chart(doc)};
  if (k == "simulate" || k == "coverage") {
    const auto rows = collect_rows(doc);
    return {ci_ladder(doc, rows), coverage_bars(doc, rows)};
  }
  throw DataError("report: kind '" + k + "' has no charts");
}

}  // namespace modeest
