#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gsde/errors.hpp"
#include "gsde/measures.hpp"
#include "gsde/sde.hpp"

namespace gsde {

struct TypicalSetRecord {
  std::string measure_id;
  std::set<std::string> path_ids;
};

struct CompatRow {
  std::string measure_p;
  std::string measure_q;
  std::string path_id;
  double deviation = 0.0;
};

struct CompatibilityReport {
  std::vector<CompatRow> pairs;
  double max_deviation = 0.0;
  bool pass = true;  // pass <=> max_deviation == 0
};

struct TableEntry {
  SolutionPath solution;
  std::set<std::string> provenance;  // measure ids that see the path
};

// The patched solution: one entry per path seen by at least one measure,
// keyed by path id so iteration order is deterministic. Paths seen by no
// measure go to exceptional and take the constant-0 default. conflicts is
// always empty on a returned table; a detected conflict throws instead.
struct UniversalSolutionTable {
  std::map<std::string, TableEntry> entries;
  std::vector<std::string> exceptional;
  std::vector<CompatRow> conflicts;
};

class ConflictError : public GsdeError {
 public:
  explicit ConflictError(CompatibilityReport report);
  const CompatibilityReport& report() const noexcept { return report_; }

 private:
  CompatibilityReport report_;
};

// True when the driver's realized vol record lies in the support of the
// spec: Constant matches a constant record, PiecewiseConstant matches its
// schedule, RegimeSwitching matches records valued in its states, Mixture
// matches when either component does. tol absorbs float comparison of the
// stored constants.
bool typical_under(const VolatilitySpec& spec, const DriverPath& driver,
                   double tol = 1e-12);

// Per-measure typical sets over the batch; a path lands in every record
// whose spec supports its vol record, generator included.
std::vector<TypicalSetRecord> assign_typical(const MeasureFamily& family,
                                             const std::vector<DriverPath>& paths,
                                             double tol = 1e-12);

// Hook for solving "as measure P". The default ignores the member and runs
// solve_strong in pathwise mode; tests substitute deliberately broken
// solvers that leak measure parameters to prove the checks can catch them.
using MeasureSolver = std::function<SolutionPath(
    const Member&, const CoefficientSet&, double, const DriverPath&)>;

SolutionPath default_measure_solver(const Member& member,
                                    const CoefficientSet& coeffs, double x0,
                                    const DriverPath& driver);

// For every path seen by two or more measures, solves once per seeing
// measure and records the sup-norm deviation of every pair. Deviations must
// be exactly 0; any nonzero entry flips pass to false.
CompatibilityReport check_compatibility(const MeasureFamily& family,
                                        const CoefficientSet& coeffs, double x0,
                                        const std::vector<DriverPath>& paths,
                                        double tol = 1e-12,
                                        MeasureSolver solver = {},
                                        int threads = 0);

struct AverageConsistencyReport {
  CompatibilityReport compat;
  std::size_t left_count = 0;   // paths the mixture attributed to P
  std::size_t right_count = 0;  // paths attributed to Q
  std::string average_id;
};

// Samples n_paths under the fair mixture of P and Q, attributes each path to
// the component its branch tag names, and compares the solve under the
// average measure with the solve under that component. Deviations must be
// exactly 0; branch counts come back for frequency checks.
AverageConsistencyReport check_average_consistency(
    const Member& p, const Member& q, const CoefficientSet& coeffs, double x0,
    std::size_t n_paths, std::shared_ptr<const TimeGrid> grid,
    std::uint64_t master_seed, MeasureSolver solver = {}, int threads = 0);

// Assembles the universal solution: each path gets the solution of its
// seeing measures (verified identical across all of them), full provenance
// recorded; unseen paths go to exceptional with the constant-0 default.
// Distinct solutions from two seeing measures raise ConflictError carrying
// the offending rows.
UniversalSolutionTable patch(const MeasureFamily& family,
                             const CoefficientSet& coeffs, double x0,
                             const std::vector<DriverPath>& paths,
                             double tol = 1e-12, MeasureSolver solver = {},
                             int threads = 0);

}  // namespace gsde
