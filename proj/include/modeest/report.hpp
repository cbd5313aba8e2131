#pragma once

// Report documents. Every document is a JSON object
//   { "schema_version": 1, "kind": ..., "manifest": {...}, "results": {...} }
// and every CSV rendering starts with a "# manifest: {...}" comment line.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modeest/dataset.hpp"
#include "modeest/simulation.hpp"
#include "modeest/theory.hpp"

namespace modeest {

inline constexpr int kSchemaVersion = 1;

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

nlohmann::json population_json(const PopulationTheory& theory);

nlohmann::json summary_document(const SummaryStats& stats, const nlohmann::json& manifest);
nlohmann::json theory_document(const PopulationTheory& theory, const std::vector<TheoryReport>& reports,
                               const nlohmann::json& manifest);
nlohmann::json simulation_document(const PopulationTheory& theory, const SimReport& report,
                                   const nlohmann::json& manifest);
nlohmann::json coverage_document(const PopulationTheory& theory, const CoverageReport& report,
                                 const nlohmann::json& manifest);
nlohmann::json sweep_document(const PopulationTheory& theory, const SweepReport& report,
                              const nlohmann::json& manifest);

/// Pretty JSON with a trailing newline; doubles in shortest round-trip form.
std::string dump_document(const nlohmann::json& doc);

/// Tabular rendering of a document (fixed 4 decimals). Throws UsageError for
/// an unknown kind.
std::string document_csv(const nlohmann::json& doc);

struct SvgFile {
  std::string name;
  std::string content;
};

/// Charts for a document: sweep curve with the L1 optimum marked, CI ladder
/// per n, coverage bars. All files are produced in memory; any problem throws
/// DataError before anything is returned.
std::vector<SvgFile> render_svgs(const nlohmann::json& doc);

}  // namespace modeest
