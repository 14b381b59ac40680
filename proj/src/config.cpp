#include "gsde/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "gsde/errors.hpp"
#include "gsde/format.hpp"

namespace gsde {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double_text(std::string_view v) {
  v = trim(v);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return std::nullopt;
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) return std::nullopt;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

std::optional<std::uint64_t> parse_u64_text(std::string_view v) {
  v = trim(v);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return std::nullopt;
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) return std::nullopt;
  return out;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string_view piece =
        trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                             : comma - start));
    parts.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(std::string text, std::string source_name) {
  Config c;
  c.source_ = std::move(source_name);
  c.text_ = std::move(text);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::ptrdiff_t current = -1;
  while (pos <= c.text_.size()) {
    const std::size_t eol = c.text_.find('\n', pos);
    std::string_view raw(c.text_.data() + pos,
                         (eol == std::string::npos ? c.text_.size() : eol) - pos);
    pos = eol == std::string::npos ? c.text_.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(c.source_, line_no, "unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError(c.source_, line_no, "empty section name");
      for (const ConfigSection& s : c.sections_)
        if (s.name == name)
          throw ConfigError(c.source_, line_no,
                            "duplicate section [" + std::string(name) + "]");
      c.sections_.push_back({std::string(name), line_no, {}});
      current = static_cast<std::ptrdiff_t>(c.sections_.size()) - 1;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(c.source_, line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(c.source_, line_no, "empty key");
    if (current < 0)
      throw ConfigError(c.source_, line_no, "entry before any [section]");
    ConfigSection& section = c.sections_[static_cast<std::size_t>(current)];
    for (const ConfigEntry& e : section.entries)
      if (e.key == key)
        throw ConfigError(c.source_, line_no,
                          "duplicate key '" + std::string(key) + "' in [" +
                              section.name + "]");
    section.entries.push_back({std::string(key), std::string(value), line_no});
  }
  return c;
}

const ConfigSection* Config::find(std::string_view name) const noexcept {
  for (const ConfigSection& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

const ConfigEntry* Config::entry(std::string_view section,
                                 std::string_view key) const noexcept {
  const ConfigSection* s = find(section);
  if (!s) return nullptr;
  for (const ConfigEntry& e : s->entries)
    if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(std::string_view section, std::string_view key) const noexcept {
  return entry(section, key) != nullptr;
}

namespace {

const ConfigEntry& require_entry(const Config& c, std::string_view section,
                                 std::string_view key) {
  const ConfigEntry* e = c.entry(section, key);
  if (!e) {
    const ConfigSection* s = c.find(section);
    throw ConfigError(c.source(), s ? static_cast<int>(s->line) : 0,
                      "missing key '" + std::string(key) + "' in section [" +
                          std::string(section) + "]");
  }
  return *e;
}

}  // namespace

std::string Config::get_string(std::string_view section,
                               std::string_view key) const {
  return require_entry(*this, section, key).value;
}

std::string Config::get_string_or(std::string_view section,
                                  std::string_view key,
                                  std::string fallback) const {
  const ConfigEntry* e = entry(section, key);
  return e ? e->value : std::move(fallback);
}

double Config::get_double(std::string_view section, std::string_view key) const {
  const ConfigEntry& e = require_entry(*this, section, key);
  const auto v = parse_double_text(e.value);
  if (!v)
    throw ConfigError(source_, e.line,
                      "expected a finite number for '" + std::string(key) +
                          "', got '" + e.value + "'");
  return *v;
}

double Config::get_double_or(std::string_view section, std::string_view key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::uint64_t Config::get_u64(std::string_view section,
                              std::string_view key) const {
  const ConfigEntry& e = require_entry(*this, section, key);
  const auto v = parse_u64_text(e.value);
  if (!v)
    throw ConfigError(source_, e.line,
                      "expected an unsigned integer for '" + std::string(key) +
                          "', got '" + e.value + "'");
  return *v;
}

std::uint64_t Config::get_u64_or(std::string_view section, std::string_view key,
                                 std::uint64_t fallback) const {
  return has(section, key) ? get_u64(section, key) : fallback;
}

bool Config::get_bool_or(std::string_view section, std::string_view key,
                         bool fallback) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(source_, e->line,
                    "expected a boolean for '" + std::string(key) + "', got '" +
                        e->value + "'");
}

std::vector<double> Config::get_double_list(std::string_view section,
                                            std::string_view key) const {
  const ConfigEntry& e = require_entry(*this, section, key);
  std::vector<double> out;
  for (const std::string& piece : split_list(e.value)) {
    const auto v = parse_double_text(piece);
    if (!v)
      throw ConfigError(source_, e.line,
                        "expected a comma-separated list of numbers for '" +
                            std::string(key) + "', got '" + e.value + "'");
    out.push_back(*v);
  }
  return out;
}

std::string Config::hash_hex() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char ch : text_) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

namespace {

VolatilitySpec parse_member_spec(const Config& c, const ConfigSection& s,
                                 const std::map<std::string, VolatilitySpec>& known) {
  const std::string section = s.name;
  const std::string kind = c.get_string(section, "kind");
  try {
    if (kind == "constant")
      return VolatilitySpec::constant(c.get_double(section, "value"));
    if (kind == "piecewise_constant") {
      std::vector<double> breakpoints;
      if (c.has(section, "breakpoints"))
        breakpoints = c.get_double_list(section, "breakpoints");
      return VolatilitySpec::piecewise(std::move(breakpoints),
                                       c.get_double_list(section, "values"));
    }
    if (kind == "regime_switching")
      return VolatilitySpec::regime_switching(
          c.get_double_list(section, "states"),
          c.get_double(section, "switch_prob"));
    if (kind == "mixture") {
      const std::string left = c.get_string(section, "left");
      const std::string right = c.get_string(section, "right");
      const double weight = c.get_double_or(section, "weight", 0.5);
      const auto li = known.find(left);
      const auto ri = known.find(right);
      if (li == known.end())
        throw ConfigError(c.source(), s.line,
                          "mixture component '" + left +
                              "' is not a previously defined member");
      if (ri == known.end())
        throw ConfigError(c.source(), s.line,
                          "mixture component '" + right +
                              "' is not a previously defined member");
      return VolatilitySpec::mixture(li->second, ri->second, weight);
    }
  } catch (const ConstructionError& e) {
    throw ConfigError(c.source(), s.line, e.what());
  }
  throw ConfigError(c.source(), c.entry(section, "kind")->line,
                    "unknown volatility kind '" + kind + "'");
}

Functional parse_functional(const Config& c) {
  const std::string section = "functional";
  const std::string kind = c.get_string(section, "kind");
  const std::string payoff = c.get_string(section, "payoff");
  const double scale = c.get_double_or(section, "scale", 1.0);

  std::function<double(double)> phi;
  std::string description;
  if (payoff == "call") {
    const double strike = c.get_double_or(section, "strike", 1.0);
    phi = [strike, scale](double x) {
      return scale * std::max(x - strike, 0.0);
    };
    description = "call(strike=" + format_double(strike) +
                  ",scale=" + format_double(scale) + ")";
  } else if (payoff == "put") {
    const double strike = c.get_double_or(section, "strike", 1.0);
    phi = [strike, scale](double x) {
      return scale * std::max(strike - x, 0.0);
    };
    description = "put(strike=" + format_double(strike) +
                  ",scale=" + format_double(scale) + ")";
  } else if (payoff == "square") {
    phi = [scale](double x) { return scale * x * x; };
    description = "square(scale=" + format_double(scale) + ")";
  } else if (payoff == "identity") {
    phi = [scale](double x) { return scale * x; };
    description = "identity(scale=" + format_double(scale) + ")";
  } else if (payoff == "constant") {
    const double value = c.get_double_or(section, "value", 1.0);
    phi = [value, scale](double) { return scale * value; };
    description = "constant(value=" + format_double(value) +
                  ",scale=" + format_double(scale) + ")";
  } else {
    throw ConfigError(c.source(), c.entry(section, "payoff")->line,
                      "unknown payoff '" + payoff + "'");
  }

  if (kind == "terminal") return Functional::terminal(phi, description);
  if (kind == "driver_terminal")
    return Functional::driver_terminal(phi, description);
  if (kind == "qv_terminal") return Functional::qv_terminal(phi, description);
  throw ConfigError(c.source(), c.entry(section, "kind")->line,
                    "unknown functional kind '" + kind + "'");
}

}  // namespace

RunConfig load_run_config(const Config& c) {
  RunConfig rc;

  if (c.find("grid")) {
    const double horizon = c.get_double("grid", "horizon");
    const std::uint64_t steps = c.get_u64("grid", "steps");
    try {
      rc.grid = make_grid_shared(horizon, static_cast<std::size_t>(steps));
    } catch (const ConstructionError& e) {
      throw ConfigError(c.source(), c.find("grid")->line, e.what());
    }
  }

  std::vector<Member> members;
  std::map<std::string, VolatilitySpec> known;
  for (const ConfigSection& s : c.sections()) {
    if (s.name.rfind("family.", 0) != 0) continue;
    const std::string id = s.name.substr(7);
    if (id.empty())
      throw ConfigError(c.source(), s.line, "family member needs an id");
    VolatilitySpec spec = parse_member_spec(c, s, known);
    known.emplace(id, spec);
    members.push_back({id, std::move(spec)});
  }
  if (!members.empty()) {
    try {
      rc.family.emplace(std::move(members));
    } catch (const ConstructionError& e) {
      throw ConfigError(c.source(), 0, e.what());
    }
  }

  if (const ConfigSection* s = c.find("coefficients")) {
    const std::string builtin = c.get_string("coefficients", "builtin");
    rc.x0 = c.get_double_or("coefficients", "x0", 1.0);
    std::map<std::string, double> params;
    for (const ConfigEntry& e : s->entries) {
      if (e.key == "builtin" || e.key == "x0") continue;
      const auto v = parse_double_text(e.value);
      if (!v)
        throw ConfigError(c.source(), e.line,
                          "expected a numeric coefficient parameter for '" +
                              e.key + "'");
      params[e.key] = *v;
    }
    try {
      rc.coefficients = builtin_coefficients(builtin, params);
    } catch (const ConstructionError& e) {
      throw ConfigError(c.source(), s->line, e.what());
    }
  }

  if (c.find("functional")) rc.functional = parse_functional(c);

  rc.n_paths = static_cast<std::size_t>(c.get_u64_or("run", "n_paths", 0));
  if (c.has("run", "master_seed"))
    rc.master_seed = c.get_u64("run", "master_seed");
  rc.threads = static_cast<int>(c.get_u64_or("run", "threads", 0));
  rc.common_random_numbers = c.get_bool_or("run", "crn", false);
  rc.typical_tol = c.get_double_or("run", "typical_tol", 1e-12);
  const std::string mode = c.get_string_or("run", "qv_mode", "pathwise");
  if (mode == "pathwise") {
    rc.qv_mode = QvMode::Pathwise;
  } else if (mode == "generator") {
    rc.qv_mode = QvMode::Generator;
  } else {
    throw ConfigError(c.source(), c.entry("run", "qv_mode")->line,
                      "qv_mode must be 'pathwise' or 'generator'");
  }

  rc.out_dir = c.get_string_or("output", "directory", "out");
  const std::string formats = c.get_string_or("output", "formats", "csv,json");
  rc.write_csv = false;
  rc.write_json = false;
  for (const std::string& piece : split_list(formats)) {
    if (piece == "csv") {
      rc.write_csv = true;
    } else if (piece == "json") {
      rc.write_json = true;
    } else {
      const ConfigEntry* e = c.entry("output", "formats");
      throw ConfigError(c.source(), e ? e->line : 0,
                        "unknown output format '" + piece + "'");
    }
  }
  return rc;
}

}  // namespace gsde
