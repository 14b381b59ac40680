#include "gsde/gexpect.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gsde/errors.hpp"
#include "gsde/parallel.hpp"

namespace gsde {

namespace {

Functional make_functional(Functional::Kind kind,
                           std::function<double(double)> phi,
                           std::string description) {
  GSDE_REQUIRE(ConstructionError, static_cast<bool>(phi),
               "functional needs an evaluable map");
  Functional f;
  f.kind = kind;
  f.phi = std::move(phi);
  f.description = std::move(description);
  return f;
}

}  // namespace

Functional Functional::terminal(std::function<double(double)> phi,
                                std::string description) {
  return make_functional(Kind::Terminal, std::move(phi), std::move(description));
}

Functional Functional::driver_terminal(std::function<double(double)> phi,
                                       std::string description) {
  return make_functional(Kind::DriverTerminal, std::move(phi),
                         std::move(description));
}

Functional Functional::qv_terminal(std::function<double(double)> phi,
                                   std::string description) {
  return make_functional(Kind::QvTerminal, std::move(phi),
                         std::move(description));
}

Estimate estimate(const Member& member, const CoefficientSet* coeffs, double x0,
                  const Functional& functional,
                  std::shared_ptr<const TimeGrid> grid, std::size_t n,
                  std::uint64_t master_seed, const EstimateOptions& opts) {
  GSDE_REQUIRE(ConstructionError, grid != nullptr, "estimate needs a grid");
  GSDE_REQUIRE(ConstructionError, n >= 2,
               "estimate needs at least two samples");
  GSDE_REQUIRE(ConstructionError, static_cast<bool>(functional.phi),
               "functional needs an evaluable map");
  GSDE_REQUIRE(ConstructionError,
               functional.kind != Functional::Kind::Terminal || coeffs != nullptr,
               "terminal functionals need a coefficient set");
  GSDE_REQUIRE(ConstructionError, opts.block_size >= 1,
               "block size must be positive");

  const std::string& stream_id =
      opts.common_random_numbers ? std::string("crn") : member.id;
  const std::size_t blocks = (n + opts.block_size - 1) / opts.block_size;
  std::vector<double> sum(blocks, 0.0);
  std::vector<double> sum_sq(blocks, 0.0);

  parallel_for(blocks, opts.threads, [&](std::size_t blk) {
    const std::size_t lo = blk * opts.block_size;
    const std::size_t hi = std::min(n, lo + opts.block_size);
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const DriverPath path =
          sample_driver(member.spec, grid,
                        RngStream::for_path(master_seed, stream_id, i),
                        PathProvenance{member.id, master_seed, i});
      double v = 0.0;
      switch (functional.kind) {
        case Functional::Kind::Terminal: {
          const SolutionPath sol = solve_strong(*coeffs, x0, path, opts.qv_mode);
          v = functional.phi(sol.values.back());
          break;
        }
        case Functional::Kind::DriverTerminal:
          v = functional.phi(path.values.back());
          break;
        case Functional::Kind::QvTerminal:
          v = functional.phi(path.qv_pathwise.back());
          break;
      }
      s += v;
      s2 += v * v;
    }
    sum[blk] = s;
    sum_sq[blk] = s2;
  });

  double total = 0.0;
  double total_sq = 0.0;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    total += sum[blk];
    total_sq += sum_sq[blk];
  }

  Estimate e;
  e.n = n;
  e.measure_id = member.id;
  e.seed = master_seed;
  e.mean = total / static_cast<double>(n);
  const double centered =
      std::max(0.0, total_sq - static_cast<double>(n) * e.mean * e.mean);
  const double variance = centered / static_cast<double>(n - 1);
  e.std_error = std::sqrt(variance / static_cast<double>(n));
  return e;
}

GEstimate g_expect(const MeasureFamily& family, const CoefficientSet* coeffs,
                   double x0, const Functional& functional,
                   std::shared_ptr<const TimeGrid> grid, std::size_t n,
                   std::uint64_t master_seed, const EstimateOptions& opts) {
  GEstimate g;
  g.per_measure.reserve(family.size());
  for (const Member& member : family.members())
    g.per_measure.push_back(
        estimate(member, coeffs, x0, functional, grid, n, master_seed, opts));

  g.sup_value = g.per_measure.front().mean;
  g.argmax_id = g.per_measure.front().measure_id;
  g.inf_value = g.sup_value;
  g.argmin_id = g.argmax_id;
  for (const Estimate& e : g.per_measure) {
    if (e.mean > g.sup_value) {
      g.sup_value = e.mean;
      g.argmax_id = e.measure_id;
    }
    if (e.mean < g.inf_value) {
      g.inf_value = e.mean;
      g.argmin_id = e.measure_id;
    }
  }
  return g;
}

GEstimate robust_price(const MeasureFamily& family, const CoefficientSet& coeffs,
                       double x0, const Functional& payoff,
                       std::shared_ptr<const TimeGrid> grid, std::size_t n,
                       std::uint64_t master_seed, const EstimateOptions& opts) {
  GSDE_REQUIRE(ConstructionError, payoff.kind == Functional::Kind::Terminal,
               "robust_price needs a terminal payoff over the solution");
  EstimateOptions price_opts = opts;
  price_opts.qv_mode = QvMode::Pathwise;
  return g_expect(family, &coeffs, x0, payoff, std::move(grid), n, master_seed,
                  price_opts);
}

}  // namespace gsde
