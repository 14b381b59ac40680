#include "gsde/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gsde/calculus.hpp"
#include "gsde/config.hpp"
#include "gsde/errors.hpp"
#include "gsde/format.hpp"
#include "gsde/gexpect.hpp"
#include "gsde/io.hpp"
#include "gsde/measures.hpp"
#include "gsde/patching.hpp"
#include "gsde/rng.hpp"
#include "gsde/sde.hpp"

namespace gsde::cli {

namespace {

struct CommandContext {
  Config config;
  RunConfig rc;
  std::filesystem::path out;
  std::vector<io::ManifestOutput> outputs;
};

[[noreturn]] void config_fail(const CommandContext& ctx, const std::string& msg) {
  throw ConfigError(ctx.config.source(), 0, msg);
}

const MeasureFamily& need_family(const CommandContext& ctx) {
  if (!ctx.rc.family) config_fail(ctx, "at least one [family.<id>] section is required");
  return *ctx.rc.family;
}

const CoefficientSet& need_coeffs(const CommandContext& ctx) {
  if (!ctx.rc.coefficients) config_fail(ctx, "a [coefficients] section is required");
  return *ctx.rc.coefficients;
}

std::shared_ptr<const TimeGrid> need_grid(const CommandContext& ctx) {
  if (!ctx.rc.grid) config_fail(ctx, "a [grid] section is required");
  return ctx.rc.grid;
}

std::uint64_t need_seed(const CommandContext& ctx) {
  if (!ctx.rc.master_seed)
    config_fail(ctx, "run.master_seed is required (no wall-clock default)");
  return *ctx.rc.master_seed;
}

void emit_csv(CommandContext& ctx, const std::string& name,
              const std::string& content) {
  if (!ctx.rc.write_csv) return;
  io::write_text_file(ctx.out / name, content);
  ctx.outputs.push_back({name, "csv", 1});
}

void emit_json(CommandContext& ctx, const std::string& name,
               const nlohmann::ordered_json& j) {
  if (!ctx.rc.write_json) return;
  io::write_text_file(ctx.out / name, j.dump(2) + "\n");
  ctx.outputs.push_back({name, "json", 1});
}

void write_manifest(CommandContext& ctx, const std::string& command) {
  const nlohmann::ordered_json manifest = io::manifest_json(
      command, ctx.config.hash_hex(), need_seed(ctx), ctx.outputs);
  io::write_text_file(ctx.out / "manifest.json", manifest.dump(2) + "\n");
}

// Paths pooled over every family member, n per member, used by compat and
// patch so support overlaps are exercised from each generator's side.
std::vector<DriverPath> pooled_batch(const CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const auto grid = need_grid(ctx);
  const std::uint64_t seed = need_seed(ctx);
  std::vector<DriverPath> pool;
  pool.reserve(family.size() * ctx.rc.n_paths);
  for (const Member& member : family.members()) {
    std::vector<DriverPath> batch =
        sample_batch(member, grid, ctx.rc.n_paths, seed, ctx.rc.threads);
    for (DriverPath& p : batch) pool.push_back(std::move(p));
  }
  return pool;
}

int cmd_simulate(CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const auto grid = need_grid(ctx);
  const std::uint64_t seed = need_seed(ctx);

  nlohmann::ordered_json summary;
  summary["grid"] = {{"horizon", grid->horizon}, {"steps", grid->step_count}};
  summary["n_paths"] = ctx.rc.n_paths;
  summary["members"] = nlohmann::ordered_json::array();
  for (const Member& member : family.members()) {
    const std::vector<DriverPath> batch =
        sample_batch(member, grid, ctx.rc.n_paths, seed, ctx.rc.threads);
    emit_csv(ctx, "drivers_" + member.id + ".csv", io::driver_batch_csv(batch));

    nlohmann::ordered_json m;
    m["id"] = member.id;
    m["spec"] = member.spec.describe();
    if (!batch.empty()) {
      double mean = 0.0;
      double lo = batch.front().qv_pathwise.back();
      double hi = lo;
      double b_mean = 0.0;
      for (const DriverPath& p : batch) {
        const double qv = p.qv_pathwise.back();
        mean += qv;
        lo = std::min(lo, qv);
        hi = std::max(hi, qv);
        b_mean += p.values.back();
      }
      mean /= static_cast<double>(batch.size());
      b_mean /= static_cast<double>(batch.size());
      m["qv_end"] = {{"mean", mean}, {"min", lo}, {"max", hi}};
      m["driver_end_mean"] = b_mean;
    }
    summary["members"].push_back(std::move(m));
  }
  emit_json(ctx, "summary.json", summary);
  write_manifest(ctx, "simulate");
  return 0;
}

int cmd_integrate(CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const auto grid = need_grid(ctx);
  const std::uint64_t seed = need_seed(ctx);
  if (ctx.rc.n_paths == 0) config_fail(ctx, "integrate needs run.n_paths >= 1");
  const std::size_t n_max =
      static_cast<std::size_t>(ctx.config.get_u64_or("integrate", "n_max", 20));
  const double tol = ctx.config.get_double_or("integrate", "tol", 0.0);
  const Member& member = family.at(0);

  std::vector<io::ConvergenceRow> rows;
  nlohmann::ordered_json paths_summary = nlohmann::ordered_json::array();
  std::size_t bound_violations = 0;
  for (std::size_t i = 0; i < ctx.rc.n_paths; ++i) {
    const DriverPath driver =
        sample_driver(member.spec, grid, RngStream::for_path(seed, member.id, i),
                      PathProvenance{member.id, seed, i});
    const GridProcess b{driver.grid, driver.values};
    const IntegralResult res = ito_limsup(b, b, n_max, tol);
    const double tv = total_variation(b);
    for (std::size_t idx = 0; idx < res.epsilon_used.size(); ++idx) {
      io::ConvergenceRow row;
      row.path_index = i;
      row.n = idx + 1;
      row.epsilon = res.epsilon_used[idx];
      row.has_gap = idx > 0;
      if (row.has_gap) row.cauchy_gap = res.cauchy_gaps[idx - 1];
      row.error_bound = res.epsilon_used[idx] * tv;
      if (res.sup_errors[idx] > row.error_bound) ++bound_violations;
      rows.push_back(row);
    }
    nlohmann::ordered_json p;
    p["path_index"] = i;
    p["stabilized_at"] = res.stabilized_at;
    p["converged"] = res.converged;
    p["final_sup_error"] = res.sup_errors.back();
    paths_summary.push_back(std::move(p));
  }

  emit_csv(ctx, "convergence.csv", io::convergence_csv(rows));
  nlohmann::ordered_json summary;
  summary["measure_id"] = member.id;
  summary["n_max"] = n_max;
  summary["tol"] = tol;
  summary["bound_violations"] = bound_violations;
  summary["paths"] = std::move(paths_summary);
  emit_json(ctx, "integrate_summary.json", summary);
  write_manifest(ctx, "integrate");
  if (bound_violations > 0) {
    std::cerr << "error: " << bound_violations
              << " row(s) violate the epsilon approximation bound\n";
    return 1;
  }
  return 0;
}

int cmd_compat(CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const CoefficientSet& coeffs = need_coeffs(ctx);
  const std::vector<DriverPath> pool = pooled_batch(ctx);
  const CompatibilityReport report =
      check_compatibility(family, coeffs, ctx.rc.x0, pool, ctx.rc.typical_tol,
                          {}, ctx.rc.threads);
  emit_json(ctx, "compat.json", io::compat_json(report));
  write_manifest(ctx, "compat");
  if (!report.pass) {
    std::cerr << "error: compatibility failed, max deviation "
              << format_double(report.max_deviation) << "\n";
    return 4;
  }
  return 0;
}

int cmd_patch(CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const CoefficientSet& coeffs = need_coeffs(ctx);
  const std::vector<DriverPath> pool = pooled_batch(ctx);
  const UniversalSolutionTable table =
      patch(family, coeffs, ctx.rc.x0, pool, ctx.rc.typical_tol, {},
            ctx.rc.threads);
  emit_csv(ctx, "table.csv", io::table_csv(table, pool));
  emit_json(ctx, "table_summary.json", io::table_summary_json(table));
  write_manifest(ctx, "patch");
  return 0;
}

int cmd_price(CommandContext& ctx) {
  const MeasureFamily& family = need_family(ctx);
  const CoefficientSet& coeffs = need_coeffs(ctx);
  const auto grid = need_grid(ctx);
  const std::uint64_t seed = need_seed(ctx);
  if (!ctx.rc.functional) config_fail(ctx, "a [functional] section is required");
  if (ctx.rc.functional->kind != Functional::Kind::Terminal)
    config_fail(ctx, "price needs functional.kind = terminal");

  EstimateOptions opts;
  opts.threads = ctx.rc.threads;
  opts.common_random_numbers = ctx.rc.common_random_numbers;
  const GEstimate g = robust_price(family, coeffs, ctx.rc.x0,
                                   *ctx.rc.functional, grid, ctx.rc.n_paths,
                                   seed, opts);
  emit_json(ctx, "gestimate.json", io::gestimate_json(g));
  emit_csv(ctx, "breakdown.csv", io::breakdown_csv(g));
  write_manifest(ctx, "price");
  return 0;
}

double declared_or(const CommandContext& ctx, const char* cfg_key,
                   const char* declared_key) {
  if (ctx.config.has("validate", cfg_key))
    return ctx.config.get_double("validate", cfg_key);
  const auto& declared = need_coeffs(ctx).declared;
  const auto it = declared.find(declared_key);
  if (it == declared.end())
    config_fail(ctx, std::string("missing validate.") + cfg_key +
                         " and the coefficient set declares no " +
                         declared_key);
  return it->second;
}

int cmd_validate(CommandContext& ctx) {
  const CoefficientSet& coeffs = need_coeffs(ctx);
  const std::uint64_t seed = need_seed(ctx);

  std::string default_target = "lipschitz";
  if (coeffs.class_tag == CoeffClass::YamadaWatanabe)
    default_target = "yamada_watanabe";
  else if (coeffs.class_tag == CoeffClass::Monotone)
    default_target = "monotone";
  const std::string target =
      ctx.config.get_string_or("validate", "target", default_target);

  Interval domain{-1.0, 1.0};
  if (ctx.config.has("validate", "domain")) {
    const std::vector<double> d = ctx.config.get_double_list("validate", "domain");
    if (d.size() != 2)
      throw ConfigError(ctx.config.source(),
                        ctx.config.entry("validate", "domain")->line,
                        "domain must be 'lo, hi'");
    domain = {d[0], d[1]};
  }
  const std::size_t n_pairs =
      static_cast<std::size_t>(ctx.config.get_u64_or("validate", "n_pairs", 20000));
  const double tolerance = ctx.config.get_double_or("validate", "tolerance", 0.01);
  RngStream stream = RngStream::for_path(seed, "validate", 0);

  RegularityReport report;
  if (target == "lipschitz") {
    report = check_lipschitz(coeffs, domain, n_pairs, stream,
                             declared_or(ctx, "declared_k", "lipschitz_K"),
                             tolerance);
  } else if (target == "yamada_watanabe") {
    const double alpha =
        ctx.config.get_double_or("validate", "alpha", coeffs.alpha);
    report = check_yamada_watanabe(coeffs, alpha, domain, n_pairs, stream,
                                   tolerance);
  } else if (target == "monotone") {
    report = check_monotone(
        coeffs, domain, n_pairs, stream,
        declared_or(ctx, "declared_k_mono", "monotone_K"),
        declared_or(ctx, "declared_k_coer", "coercivity_K"), tolerance);
  } else {
    config_fail(ctx, "validate.target must be lipschitz, yamada_watanabe, or monotone");
  }

  emit_json(ctx, "regularity.json", io::regularity_json(report));
  write_manifest(ctx, "validate");
  return report.pass ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Quasi-sure SDE simulation under volatility uncertainty"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = -1;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Generate driver paths per family member"},
      {"integrate", "Tabulate stopping-time approximant convergence"},
      {"compat", "Verify cross-measure solution compatibility"},
      {"patch", "Assemble the universal solution table"},
      {"price", "Worst-case expectation over the measure family"},
      {"validate", "Run coefficient regularity checks"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "Path to the run configuration")
        ->required();
    sub->add_option("--out", out_dir, "Output directory (overrides config)");
    sub->add_option("--threads", threads, "Parallelism width (overrides config)");
    sub->add_option("--seed", seed, "Master seed (overrides config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    CommandContext ctx;
    ctx.config = Config::parse_file(config_path);
    ctx.rc = load_run_config(ctx.config);
    if (!out_dir.empty()) ctx.rc.out_dir = out_dir;
    if (threads >= 0) ctx.rc.threads = threads;
    if (chosen->count("--seed") > 0) ctx.rc.master_seed = seed;
    ctx.out = ctx.rc.out_dir;
    std::filesystem::create_directories(ctx.out);

    const std::string name = chosen->get_name();
    if (name == "simulate") return cmd_simulate(ctx);
    if (name == "integrate") return cmd_integrate(ctx);
    if (name == "compat") return cmd_compat(ctx);
    if (name == "patch") return cmd_patch(ctx);
    if (name == "price") return cmd_price(ctx);
    if (name == "validate") return cmd_validate(ctx);
    std::cerr << "error: unknown command '" << name << "'\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConflictError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gsde::cli
