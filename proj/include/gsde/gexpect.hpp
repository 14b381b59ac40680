#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gsde/measures.hpp"
#include "gsde/sde.hpp"

namespace gsde {

// A terminal functional of one path: phi applied to X_T (Terminal, needs
// coefficients), to B_T (DriverTerminal), or to the pathwise QV at T
// (QvTerminal). Values are read off the path, never off measure parameters.
struct Functional {
  enum class Kind { Terminal, DriverTerminal, QvTerminal };

  Kind kind = Kind::DriverTerminal;
  std::function<double(double)> phi;
  std::string description;

  static Functional terminal(std::function<double(double)> phi,
                             std::string description);
  static Functional driver_terminal(std::function<double(double)> phi,
                                    std::string description);
  static Functional qv_terminal(std::function<double(double)> phi,
                                std::string description);
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
  std::string measure_id;
  std::uint64_t seed = 0;
};

struct GEstimate {
  std::vector<Estimate> per_measure;
  double sup_value = 0.0;
  std::string argmax_id;  // first attaining member in family order
  double inf_value = 0.0;
  std::string argmin_id;
};

struct EstimateOptions {
  int threads = 0;
  QvMode qv_mode = QvMode::Pathwise;
  // Share the per-path streams across members (useful for constant-vol
  // families) so sup comparisons see common noise.
  bool common_random_numbers = false;
  std::size_t block_size = 4096;
};

// Monte Carlo mean of the functional under one member. Paths accumulate into
// fixed-size blocks whose partial sums are merged in block order, so the
// result does not depend on how many threads ran. coeffs may be null for
// driver and QV functionals.
Estimate estimate(const Member& member, const CoefficientSet* coeffs, double x0,
                  const Functional& functional,
                  std::shared_ptr<const TimeGrid> grid, std::size_t n,
                  std::uint64_t master_seed,
                  const EstimateOptions& opts = {});

// Per-member estimates plus the worst-case envelope: sup and inf of the
// means with first-in-family-order tie-break.
GEstimate g_expect(const MeasureFamily& family, const CoefficientSet* coeffs,
                   double x0, const Functional& functional,
                   std::shared_ptr<const TimeGrid> grid, std::size_t n,
                   std::uint64_t master_seed,
                   const EstimateOptions& opts = {});

// The pricing pipeline: per-measure simulation through the strong solver in
// pathwise QV mode, payoff evaluated on each path's own terminal state,
// worst case across the family. The payoff must be a Terminal functional.
GEstimate robust_price(const MeasureFamily& family, const CoefficientSet& coeffs,
                       double x0, const Functional& payoff,
                       std::shared_ptr<const TimeGrid> grid, std::size_t n,
                       std::uint64_t master_seed,
                       const EstimateOptions& opts = {});

}  // namespace gsde
