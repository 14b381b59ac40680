#include "gsde/patching.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gsde/format.hpp"
#include "gsde/parallel.hpp"

namespace gsde {

namespace {

double schedule_value(const std::vector<double>& breakpoints,
                      const std::vector<double>& values, double t) {
  const std::size_t seg =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), t) -
      breakpoints.begin();
  return values[seg];
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

// Measure indices whose spec supports the path's vol record, family order.
std::vector<std::size_t> seeing_members(const MeasureFamily& family,
                                        const DriverPath& path, double tol) {
  std::vector<std::size_t> seeing;
  for (std::size_t m = 0; m < family.size(); ++m)
    if (typical_under(family.at(m).spec, path, tol)) seeing.push_back(m);
  return seeing;
}

}  // namespace

ConflictError::ConflictError(CompatibilityReport report)
    : GsdeError("universal solution conflict on " +
                format_u64(report.pairs.size()) +
                " (measure pair, path) combination(s); max deviation " +
                format_double(report.max_deviation)),
      report_(std::move(report)) {}

bool typical_under(const VolatilitySpec& spec, const DriverPath& driver,
                   double tol) {
  GSDE_REQUIRE(ConstructionError, driver.grid != nullptr, "driver has no grid");
  GSDE_REQUIRE(ConstructionError,
               driver.vol_record.size() == driver.grid->step_count,
               "driver vol record does not match its grid");
  GSDE_REQUIRE(ConstructionError, std::isfinite(tol) && tol >= 0.0,
               "typicality tolerance must be nonnegative");
  const std::vector<double>& mu = driver.vol_record;
  switch (spec.kind()) {
    case VolatilitySpec::Kind::Constant: {
      const double v = spec.constant_value();
      for (double m : mu)
        if (std::abs(m - v) > tol) return false;
      return true;
    }
    case VolatilitySpec::Kind::PiecewiseConstant: {
      for (std::size_t k = 0; k < mu.size(); ++k) {
        const double v = schedule_value(spec.breakpoints(), spec.piece_values(),
                                        driver.grid->points[k]);
        if (std::abs(mu[k] - v) > tol) return false;
      }
      return true;
    }
    case VolatilitySpec::Kind::RegimeSwitching: {
      for (double m : mu) {
        bool in_states = false;
        for (double s : spec.states())
          if (std::abs(m - s) <= tol) {
            in_states = true;
            break;
          }
        if (!in_states) return false;
      }
      return true;
    }
    case VolatilitySpec::Kind::Mixture:
      return typical_under(spec.left(), driver, tol) ||
             typical_under(spec.right(), driver, tol);
  }
  return false;
}

std::vector<TypicalSetRecord> assign_typical(const MeasureFamily& family,
                                             const std::vector<DriverPath>& paths,
                                             double tol) {
  std::vector<TypicalSetRecord> records(family.size());
  for (std::size_t m = 0; m < family.size(); ++m)
    records[m].measure_id = family.at(m).id;
  for (const DriverPath& p : paths)
    for (std::size_t m : seeing_members(family, p, tol))
      records[m].path_ids.insert(p.provenance.key());
  return records;
}

SolutionPath default_measure_solver(const Member&, const CoefficientSet& coeffs,
                                    double x0, const DriverPath& driver) {
  return solve_strong(coeffs, x0, driver, QvMode::Pathwise);
}

CompatibilityReport check_compatibility(const MeasureFamily& family,
                                        const CoefficientSet& coeffs, double x0,
                                        const std::vector<DriverPath>& paths,
                                        double tol, MeasureSolver solver,
                                        int threads) {
  if (!solver) solver = default_measure_solver;
  std::vector<std::vector<CompatRow>> rows_per_path(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    const DriverPath& path = paths[i];
    const std::vector<std::size_t> seeing = seeing_members(family, path, tol);
    if (seeing.size() < 2) return;
    std::vector<SolutionPath> sols;
    sols.reserve(seeing.size());
    for (std::size_t m : seeing)
      sols.push_back(solver(family.at(m), coeffs, x0, path));
    for (std::size_t a = 0; a < seeing.size(); ++a)
      for (std::size_t b = a + 1; b < seeing.size(); ++b)
        rows_per_path[i].push_back(
            {family.at(seeing[a]).id, family.at(seeing[b]).id,
             path.provenance.key(),
             sup_diff(sols[a].values, sols[b].values)});
  });
  CompatibilityReport report;
  for (const auto& rows : rows_per_path)
    report.pairs.insert(report.pairs.end(), rows.begin(), rows.end());
  for (const CompatRow& row : report.pairs)
    report.max_deviation = std::max(report.max_deviation, row.deviation);
  report.pass = report.max_deviation == 0.0;
  return report;
}

AverageConsistencyReport check_average_consistency(
    const Member& p, const Member& q, const CoefficientSet& coeffs, double x0,
    std::size_t n_paths, std::shared_ptr<const TimeGrid> grid,
    std::uint64_t master_seed, MeasureSolver solver, int threads) {
  if (!solver) solver = default_measure_solver;
  const Member avg{"avg(" + p.id + "," + q.id + ")",
                   average_measure(p.spec, q.spec)};
  const std::vector<DriverPath> paths =
      sample_batch(avg, std::move(grid), n_paths, master_seed, threads);

  std::vector<CompatRow> rows(paths.size());
  std::vector<unsigned char> went_left(paths.size(), 0);
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    const DriverPath& path = paths[i];
    const bool left = path.branch_tag == "left" ||
                      path.branch_tag.rfind("left/", 0) == 0;
    went_left[i] = left ? 1 : 0;
    const Member& component = left ? p : q;
    const SolutionPath under_avg = solver(avg, coeffs, x0, path);
    const SolutionPath under_component = solver(component, coeffs, x0, path);
    rows[i] = {avg.id, component.id, path.provenance.key(),
               sup_diff(under_avg.values, under_component.values)};
  });

  AverageConsistencyReport out;
  out.average_id = avg.id;
  out.compat.pairs = std::move(rows);
  for (const CompatRow& row : out.compat.pairs)
    out.compat.max_deviation = std::max(out.compat.max_deviation, row.deviation);
  out.compat.pass = out.compat.max_deviation == 0.0;
  for (unsigned char flag : went_left) {
    if (flag)
      ++out.left_count;
    else
      ++out.right_count;
  }
  return out;
}

UniversalSolutionTable patch(const MeasureFamily& family,
                             const CoefficientSet& coeffs, double x0,
                             const std::vector<DriverPath>& paths, double tol,
                             MeasureSolver solver, int threads) {
  if (!solver) solver = default_measure_solver;

  struct Slot {
    bool exceptional = false;
    TableEntry entry;
    std::vector<CompatRow> conflicts;
  };
  std::vector<Slot> slots(paths.size());

  parallel_for(paths.size(), threads, [&](std::size_t i) {
    const DriverPath& path = paths[i];
    Slot& slot = slots[i];
    const std::vector<std::size_t> seeing = seeing_members(family, path, tol);
    if (seeing.empty()) {
      slot.exceptional = true;
      return;
    }
    std::vector<SolutionPath> sols;
    sols.reserve(seeing.size());
    for (std::size_t m : seeing) {
      sols.push_back(solver(family.at(m), coeffs, x0, path));
      slot.entry.provenance.insert(family.at(m).id);
    }
    for (std::size_t a = 0; a + 1 < seeing.size(); ++a) {
      const double dev = sup_diff(sols[a].values, sols[a + 1].values);
      if (dev != 0.0)
        slot.conflicts.push_back({family.at(seeing[a]).id,
                                  family.at(seeing[a + 1]).id,
                                  path.provenance.key(), dev});
    }
    slot.entry.solution = std::move(sols.front());
  });

  CompatibilityReport conflict_report;
  UniversalSolutionTable table;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Slot& slot = slots[i];
    const std::string key = paths[i].provenance.key();
    if (!slot.conflicts.empty()) {
      conflict_report.pairs.insert(conflict_report.pairs.end(),
                                   slot.conflicts.begin(),
                                   slot.conflicts.end());
      continue;
    }
    if (slot.exceptional) {
      table.exceptional.push_back(key);
      continue;
    }
    GSDE_REQUIRE(ConstructionError,
                 table.entries.emplace(key, std::move(slot.entry)).second,
                 "duplicate path id '" + key + "' in patch batch");
  }
  if (!conflict_report.pairs.empty()) {
    for (const CompatRow& row : conflict_report.pairs)
      conflict_report.max_deviation =
          std::max(conflict_report.max_deviation, row.deviation);
    conflict_report.pass = false;
    throw ConflictError(std::move(conflict_report));
  }
  return table;
}

}  // namespace gsde
