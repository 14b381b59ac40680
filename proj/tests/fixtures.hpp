#pragma once

// Shared test fixtures: the engineered-overlap family, a deliberately broken
// measure-dependent solver, and drivers that miss every support.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>

#include "gsde/measures.hpp"
#include "gsde/patching.hpp"
#include "gsde/sde.hpp"

namespace fixtures {

// Two members whose supports overlap exactly on the constant-4 records:
// every path generated under c4 is typical under rs as well.
inline gsde::MeasureFamily overlap_family(double switch_prob = 0.1) {
  return gsde::MeasureFamily({
      {"c4", gsde::VolatilitySpec::constant(4.0)},
      {"rs", gsde::VolatilitySpec::regime_switching({1.0, 4.0}, switch_prob)},
  });
}

// A solver that pretends the generator ran at the member's nominal rate (the
// midpoint of its bounds): increments are rescaled by sqrt(nominal / mu_k)
// before solving. The output then depends on which measure is asked, which
// is precisely the defect the compatibility checks exist to catch. Under a
// member whose nominal rate equals the record the rescale factor is 1 and
// the honest solution comes back.
inline gsde::MeasureSolver nominal_rate_solver() {
  return [](const gsde::Member& member, const gsde::CoefficientSet& coeffs,
            double x0, const gsde::DriverPath& driver) {
    const gsde::VolBounds& b = member.spec.bounds();
    const double nominal = 0.5 * (b.lower + b.upper);
    gsde::DriverPath scaled = driver;
    double level = 0.0;
    double qv = 0.0;
    for (std::size_t k = 0; k + 1 < driver.values.size(); ++k) {
      const double db = driver.values[k + 1] - driver.values[k];
      const double fake = db * std::sqrt(nominal / driver.vol_record[k]);
      level += fake;
      qv += fake * fake;
      scaled.values[k + 1] = level;
      scaled.qv_pathwise[k + 1] = qv;
      scaled.vol_record[k] = nominal;
    }
    gsde::SolutionPath sol =
        gsde::solve_strong(coeffs, x0, scaled, gsde::QvMode::Pathwise);
    sol.measure_id = member.id;
    return sol;
  };
}

// A path whose vol record (constant `rate`) lies outside the support of
// every overlap_family member when rate avoids {1, 4}.
inline gsde::DriverPath off_support_driver(std::shared_ptr<const gsde::TimeGrid> grid,
                                           double rate = 9.0,
                                           std::uint64_t seed = 7) {
  return gsde::sample_driver(
      gsde::VolatilitySpec::constant(rate), std::move(grid),
      gsde::RngStream::for_path(seed, "import", 0),
      gsde::PathProvenance{"import", seed, 0});
}

}  // namespace fixtures
