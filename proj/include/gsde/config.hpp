#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsde/gexpect.hpp"
#include "gsde/grid.hpp"
#include "gsde/measures.hpp"
#include "gsde/sde.hpp"

namespace gsde {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigSection {
  std::string name;
  std::size_t line = 0;
  std::vector<ConfigEntry> entries;
};

// Sectioned key = value configuration. '#' starts a comment, ';' comments a
// whole line, section names may contain dots for grouping ([family.p]).
// Section order is preserved: it fixes family order and hence tie-breaks.
// All parse and lookup failures throw ConfigError carrying source:line.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(std::string text, std::string source_name);

  const std::string& source() const noexcept { return source_; }
  const std::vector<ConfigSection>& sections() const noexcept {
    return sections_;
  }
  const ConfigSection* find(std::string_view name) const noexcept;
  const ConfigEntry* entry(std::string_view section,
                           std::string_view key) const noexcept;
  bool has(std::string_view section, std::string_view key) const noexcept;

  std::string get_string(std::string_view section, std::string_view key) const;
  std::string get_string_or(std::string_view section, std::string_view key,
                            std::string fallback) const;
  double get_double(std::string_view section, std::string_view key) const;
  double get_double_or(std::string_view section, std::string_view key,
                       double fallback) const;
  std::uint64_t get_u64(std::string_view section, std::string_view key) const;
  std::uint64_t get_u64_or(std::string_view section, std::string_view key,
                           std::uint64_t fallback) const;
  bool get_bool_or(std::string_view section, std::string_view key,
                   bool fallback) const;
  std::vector<double> get_double_list(std::string_view section,
                                      std::string_view key) const;

  // FNV-1a of the raw text, the config fingerprint recorded in manifests.
  std::string hash_hex() const;

 private:
  std::string source_;
  std::string text_;
  std::vector<ConfigSection> sections_;
};

// Parsed common sections, shared by every command; optional parts stay empty
// until a command needs them and each command validates what it requires.
struct RunConfig {
  std::shared_ptr<const TimeGrid> grid;        // [grid] horizon, steps
  std::optional<MeasureFamily> family;         // [family.<id>] sections
  std::optional<CoefficientSet> coefficients;  // [coefficients]
  double x0 = 1.0;
  std::optional<Functional> functional;        // [functional]
  std::size_t n_paths = 0;                     // [run]
  std::optional<std::uint64_t> master_seed;    // mandatory, no clock default
  int threads = 0;
  QvMode qv_mode = QvMode::Pathwise;
  bool common_random_numbers = false;
  double typical_tol = 1e-12;
  std::string out_dir = "out";                 // [output]
  bool write_csv = true;
  bool write_json = true;
};

RunConfig load_run_config(const Config& config);

}  // namespace gsde
