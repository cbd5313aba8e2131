#include "modeest/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "modeest/error.hpp"
#include "modeest/estimators.hpp"

namespace modeest {

PairedPopulation::PairedPopulation(std::vector<double> y, std::vector<double> x)
    : y_(std::move(y)), x_(std::move(x)) {
  if (y_.size() != x_.size()) {
    throw DataError("population columns differ in length: y has " + std::to_string(y_.size()) +
                    ", x has " + std::to_string(x_.size()));
  }
  if (y_.size() < kMinPopulationSize) {
    throw DataError("population too small: N=" + std::to_string(y_.size()) + " (need at least " +
                    std::to_string(kMinPopulationSize) + ")");
  }
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i]) || !std::isfinite(x_[i])) {
      throw DataError("non-finite value at unit " + std::to_string(i));
    }
  }
}

void GeneratorConfig::validate() const {
  if (population_size < kMinPopulationSize) throw UsageError("generator: N must be at least 4");
  if (!(gamma_shape > 0.0) || !std::isfinite(gamma_shape))
    throw UsageError("generator: gamma shape must be positive");
  if (!(gamma_scale > 0.0) || !std::isfinite(gamma_scale))
    throw UsageError("generator: gamma scale must be positive");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw UsageError("generator: noise sd must be non-negative");
  if (!std::isfinite(intercept) || !std::isfinite(slope))
    throw UsageError("generator: intercept and slope must be finite");
}

PairedPopulation generate_population(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<double> x(cfg.population_size);
  std::vector<double> y(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    x[i] = rng.gamma(cfg.gamma_shape, cfg.gamma_scale);
    const double z = rng.normal();
    y[i] = cfg.intercept + cfg.slope * x[i] + cfg.noise_sd * z;
  }
  return PairedPopulation(std::move(y), std::move(x));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_cell(std::string_view cell, std::size_t row, const char* column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("row " + std::to_string(row) + ": non-numeric value '" + std::string(cell) +
                    "' in column " + column);
  }
  return value;
}

}  // namespace

PairedPopulation parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<double> y;
  std::vector<double> x;
  bool have_header = false;
  std::size_t y_col = 0;
  std::size_t x_col = 0;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::size_t row = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view raw = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (!have_header) {
      if (line.front() == '#') continue;
      const auto cells = split_commas(line);
      bool found_y = false;
      bool found_x = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto name = lower(cells[c]);
        if (name == "y" && !found_y) {
          y_col = c;
          found_y = true;
        } else if (name == "x" && !found_x) {
          x_col = c;
          found_x = true;
        }
      }
      if (!found_y) throw DataError("header (line " + std::to_string(line_no) + "): missing column y");
      if (!found_x) throw DataError("header (line " + std::to_string(line_no) + "): missing column x");
      columns = cells.size();
      have_header = true;
      continue;
    }

    ++row;
    const auto cells = split_commas(line);
    if (cells.size() != columns) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                      " columns, found " + std::to_string(cells.size()));
    }
    y.push_back(parse_cell(cells[y_col], row, "y"));
    x.push_back(parse_cell(cells[x_col], row, "x"));
  }

  if (y.empty()) throw DataError("no data rows");
  if (y.size() < kMinPopulationSize) {
    throw DataError("population too small: " + std::to_string(y.size()) + " data rows (need at least " +
                    std::to_string(kMinPopulationSize) + ")");
  }
  return PairedPopulation(std::move(y), std::move(x));
}

PairedPopulation load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

void write_csv(const PairedPopulation& pop, std::ostream& out) {
  char buf[64];
  out << "y,x\n";
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto* end = std::to_chars(buf, buf + sizeof buf, pop.y()[i], std::chars_format::general, 17).ptr;
    *end++ = ',';
    end = std::to_chars(end, buf + sizeof buf, pop.x()[i], std::chars_format::general, 17).ptr;
    *end++ = '\n';
    out.write(buf, end - buf);
  }
}

Quartiles tukey_quartiles(std::span<const double> sorted) {
  if (sorted.empty()) throw UsageError("quartiles of an empty set");
  const std::size_t n = sorted.size();
  const double median = median_of_sorted(sorted);
  if (n == 1) return {median, median, median};
  const std::size_t half = n / 2;
  return {median_of_sorted(sorted.first(half)), median, median_of_sorted(sorted.last(half))};
}

VariableSummary summarize_values(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const Quartiles q = tukey_quartiles(sorted);
  return {sorted.front(), q.lower, q.median, mean_of_sorted(sorted), q.upper, sorted.back()};
}

SummaryStats summarize(const PairedPopulation& pop) {
  return {summarize_values(pop.y()), summarize_values(pop.x())};
}

SampleDraw srswor(const PairedPopulation& pop, std::size_t n, Rng& rng) {
  const std::size_t N = pop.size();
  if (n < 2 || n > N) {
    throw UsageError("sample size n=" + std::to_string(n) + " outside [2, " + std::to_string(N) + "]");
  }
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    const auto j = k + static_cast<std::size_t>(rng.below(N - k));
    std::swap(order[k], order[j]);
  }
  order.resize(n);

  SampleDraw draw;
  draw.y.reserve(n);
  draw.x.reserve(n);
  for (const auto idx : order) {
    draw.y.push_back(pop.y()[idx]);
    draw.x.push_back(pop.x()[idx]);
  }
  draw.indices = std::move(order);
  return draw;
}

SampleDraw srswor(const PairedPopulation& pop, std::size_t n, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  return srswor(pop, n, rng);
}

std::uint64_t binomial_capped(std::uint64_t N, std::uint64_t n, std::uint64_t cap) {
  if (n > N) return 0;
  n = std::min(n, N - n);
  __extension__ unsigned __int128 value = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    // C(N-n+i, i) = C(N-n+i-1, i-1) * (N-n+i) / i, exact at every step.
    value = value * (N - n + i) / i;
    if (value > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(value);
}

void for_each_sample(const PairedPopulation& pop, std::size_t n,
                     const std::function<void(const SampleDraw&)>& visit, std::uint64_t cap) {
  const std::size_t N = pop.size();
  if (n < 2 || n > N) {
    throw UsageError("sample size n=" + std::to_string(n) + " outside [2, " + std::to_string(N) + "]");
  }
  const auto count = binomial_capped(N, n, cap);
  if (count > cap) {
    throw UsageError("C(" + std::to_string(N) + "," + std::to_string(n) + ") exceeds enumeration cap " +
                     std::to_string(cap));
  }

  SampleDraw draw;
  draw.indices.resize(n);
  draw.y.resize(n);
  draw.x.resize(n);
  std::iota(draw.indices.begin(), draw.indices.end(), std::size_t{0});
  for (;;) {
    for (std::size_t k = 0; k < n; ++k) {
      draw.y[k] = pop.y()[draw.indices[k]];
      draw.x[k] = pop.x()[draw.indices[k]];
    }
    visit(draw);

    // Advance to the next combination in lexicographic order.
    std::size_t k = n;
    while (k > 0 && draw.indices[k - 1] == N - n + (k - 1)) --k;
    if (k == 0) return;
    ++draw.indices[k - 1];
    for (std::size_t j = k; j < n; ++j) draw.indices[j] = draw.indices[j - 1] + 1;
  }
}

std::vector<SampleDraw> enumerate_samples(const PairedPopulation& pop, std::size_t n, std::uint64_t cap) {
  std::vector<SampleDraw> out;
  for_each_sample(pop, n, [&](const SampleDraw& d) { out.push_back(d); }, cap);
  return out;
}

}  // namespace modeest
