#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gsde/gexpect.hpp"
#include "gsde/measures.hpp"
#include "gsde/patching.hpp"
#include "gsde/sde.hpp"

namespace gsde::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Byte-stable file output: '\n' line endings, '.' decimal separator,
// shortest round-trip numbers, no clocks and no thread counts anywhere.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

std::string driver_batch_csv(const std::vector<DriverPath>& paths);

struct ConvergenceRow {
  std::uint64_t path_index = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  double cauchy_gap = 0.0;  // meaningful from n = 2 on
  bool has_gap = false;
  double error_bound = 0.0;  // epsilon * total variation of the integrator
};

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

std::string breakdown_csv(const GEstimate& g);

// Entries in path-id order, then exceptional paths (X identically 0, empty
// provenance). paths supplies grids and values for the exceptional rows.
std::string table_csv(const UniversalSolutionTable& table,
                      const std::vector<DriverPath>& paths);

nlohmann::ordered_json gestimate_json(const GEstimate& g);
nlohmann::ordered_json compat_json(const CompatibilityReport& report);
nlohmann::ordered_json average_consistency_json(
    const AverageConsistencyReport& report);
nlohmann::ordered_json table_summary_json(const UniversalSolutionTable& table);
nlohmann::ordered_json regularity_json(const RegularityReport& report);

struct ManifestOutput {
  std::string file;
  std::string format;
  int format_version = 1;
};

nlohmann::ordered_json manifest_json(const std::string& command,
                                     const std::string& config_hash,
                                     std::uint64_t master_seed,
                                     const std::vector<ManifestOutput>& outputs);

std::string coeff_class_name(CoeffClass tag);

}  // namespace gsde::io
