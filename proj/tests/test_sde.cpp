#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "gsde/errors.hpp"
#include "gsde/grid.hpp"
#include "gsde/measures.hpp"
#include "gsde/rng.hpp"
#include "gsde/sde.hpp"

using gsde::builtin_coefficients;
using gsde::CoefficientSet;
using gsde::DriverPath;
using gsde::make_grid_shared;
using gsde::QvMode;
using gsde::RngStream;
using gsde::SolutionPath;
using gsde::VolatilitySpec;

namespace {

DriverPath driver_under(const VolatilitySpec& spec, std::size_t steps,
                        std::uint64_t index, std::uint64_t seed = 13) {
  return gsde::sample_driver(spec, make_grid_shared(1.0, steps),
                             RngStream::for_path(seed, "sde", index),
                             {"sde", seed, index});
}

}  // namespace

TEST_CASE("euler step applies each channel once") {
  CoefficientSet c;
  c.b = [](double, double) { return 2.0; };
  c.h = [](double, double) { return 3.0; };
  c.sigma = [](double, double) { return 5.0; };
  CHECK(gsde::euler_step(c, 0.0, 1.0, 0.5, 0.25, 0.125) ==
        1.0 + 2.0 * 0.5 + 3.0 * 0.25 + 5.0 * 0.125);
}

TEST_CASE("catalog rejects unknown names and parameters") {
  CHECK_THROWS_AS(builtin_coefficients("nope"), gsde::ConstructionError);
  CHECK_THROWS_AS(builtin_coefficients("gbm", {{"bogus", 1.0}}),
                  gsde::ConstructionError);
  CHECK_THROWS_AS(builtin_coefficients("sqrt_diffusion", {{"alpha", 1.5}}),
                  gsde::ConstructionError);
  const CoefficientSet gbm = builtin_coefficients("gbm");
  CHECK(gbm.b(0.0, 2.0) == doctest::Approx(0.1));
  CHECK(gbm.h(0.0, 2.0) == 0.0);
  CHECK(gbm.sigma(0.0, 2.0) == doctest::Approx(0.4));
}

TEST_CASE("solving twice is bitwise identical and blind to the measure id") {
  const CoefficientSet coeffs = builtin_coefficients("qv_drift_gbm");
  DriverPath d = driver_under(VolatilitySpec::constant(4.0), 256, 0);
  const SolutionPath a = gsde::solve_strong(coeffs, 1.0, d);
  d.provenance.measure_id = "renamed";
  const SolutionPath b = gsde::solve_strong(coeffs, 1.0, d);
  CHECK(a.values == b.values);
}

TEST_CASE("pathwise solutions depend on driver values alone") {
  const CoefficientSet coeffs = builtin_coefficients("gbm");
  DriverPath d = driver_under(VolatilitySpec::constant(4.0), 128, 1);
  const SolutionPath a = gsde::solve_strong(coeffs, 1.0, d, QvMode::Pathwise);
  for (double& m : d.vol_record) m = 1.0;  // lie about the generator
  const SolutionPath b = gsde::solve_strong(coeffs, 1.0, d, QvMode::Pathwise);
  CHECK(a.values == b.values);
}

TEST_CASE("restarting mid-path reproduces the full solve exactly") {
  const CoefficientSet coeffs = builtin_coefficients("qv_drift_gbm");
  const DriverPath d = driver_under(VolatilitySpec::regime_switching({1.0, 4.0}, 0.1),
                                    512, 2);
  for (const QvMode mode : {QvMode::Pathwise, QvMode::Generator}) {
    const SolutionPath full = gsde::solve_strong(coeffs, 1.0, d, mode);
    const std::vector<double> head =
        gsde::solve_strong_range(coeffs, 1.0, d, mode, 0, 256);
    const std::vector<double> tail =
        gsde::solve_strong_range(coeffs, head.back(), d, mode, 256, 512);
    for (std::size_t k = 0; k <= 256; ++k)
      CHECK(full.values[k] == head[k]);
    for (std::size_t k = 0; k <= 256; ++k)
      CHECK(full.values[256 + k] == tail[k]);
  }
}

TEST_CASE("euler residuals of stored solutions are exactly zero") {
  const CoefficientSet coeffs = builtin_coefficients("qv_drift_gbm");
  for (std::uint64_t i = 0; i < 10; ++i) {
    const DriverPath d =
        driver_under(VolatilitySpec::regime_switching({1.0, 4.0}, 0.2), 256, 10 + i);
    for (const QvMode mode : {QvMode::Pathwise, QvMode::Generator}) {
      const SolutionPath s = gsde::solve_strong(coeffs, 1.0, d, mode);
      CHECK(gsde::max_euler_residual(coeffs, d, s) == 0.0);
    }
  }
}

TEST_CASE("generator and pathwise feeds converge together as the grid refines") {
  const CoefficientSet coeffs = builtin_coefficients("qv_drift_gbm");
  auto median_gap = [&](std::size_t steps) {
    std::vector<double> gaps;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const DriverPath d = driver_under(VolatilitySpec::constant(4.0), steps, i, 99);
      const SolutionPath p = gsde::solve_strong(coeffs, 1.0, d, QvMode::Pathwise);
      const SolutionPath g = gsde::solve_strong(coeffs, 1.0, d, QvMode::Generator);
      double gap = 0.0;
      for (std::size_t k = 0; k < p.values.size(); ++k)
        gap = std::max(gap, std::abs(p.values[k] - g.values[k]));
      gaps.push_back(gap);
    }
    std::nth_element(gaps.begin(), gaps.begin() + 50, gaps.end());
    return gaps[50];
  };
  const double coarse = median_gap(1u << 8);
  const double fine = median_gap(1u << 12);
  CHECK(fine < coarse);
}

TEST_CASE("non-finite states raise a blow-up naming the step") {
  CoefficientSet c;
  c.b = [](double, double x) { return x * 1e200; };
  c.h = [](double, double) { return 0.0; };
  c.sigma = [](double, double) { return 0.0; };
  const DriverPath d = driver_under(VolatilitySpec::constant(1.0), 8, 3);
  try {
    gsde::solve_strong(c, 1.0, d);
    FAIL("expected BlowUpError");
  } catch (const gsde::BlowUpError& e) {
    CHECK(e.step() == 2);
    CHECK(e.path_key() == d.provenance.key());
  }
}

TEST_CASE("linear coefficients pass the lipschitz falsifier at their constant") {
  const CoefficientSet gbm = builtin_coefficients("gbm");
  RngStream s = RngStream::for_path(7, "validate", 0);
  const gsde::RegularityReport ok =
      gsde::check_lipschitz(gbm, {-5.0, 5.0}, 20000, s, 0.2);
  CHECK(ok.pass);
  CHECK(ok.violations == 0);
  CHECK(ok.constants.at("K") == doctest::Approx(0.2).epsilon(0.01));

  const gsde::RegularityReport tight =
      gsde::check_lipschitz(gbm, {-5.0, 5.0}, 20000, s, 0.15);
  CHECK_FALSE(tight.pass);
  CHECK(tight.violations > 0);
}

TEST_CASE("square-root diffusion is caught by lipschitz, passed by its own class") {
  const CoefficientSet sq = builtin_coefficients("sqrt_diffusion");
  RngStream s = RngStream::for_path(8, "validate", 0);
  const gsde::RegularityReport lip =
      gsde::check_lipschitz(sq, {0.0, 1.0}, 20000, s, 1.0);
  CHECK_FALSE(lip.pass);

  const gsde::RegularityReport yw =
      gsde::check_yamada_watanabe(sq, 0.5, {-1.0, 1.0}, 20000, s);
  CHECK(yw.pass);
  for (const auto& [name, verdict] : yw.sub_verdicts) CHECK(verdict);
}

TEST_CASE("modulus exponents below one half fail the divergence test") {
  const CoefficientSet sq =
      builtin_coefficients("sqrt_diffusion", {{"alpha", 0.4}});
  RngStream s = RngStream::for_path(9, "validate", 0);
  const gsde::RegularityReport yw =
      gsde::check_yamada_watanabe(sq, 0.4, {-1.0, 1.0}, 20000, s);
  CHECK_FALSE(yw.pass);
  bool divergence_failed = false;
  for (const auto& [name, verdict] : yw.sub_verdicts)
    if (name == "integral_divergence") divergence_failed = !verdict;
  CHECK(divergence_failed);
}

TEST_CASE("cubic drift passes monotone, growing drift fails it") {
  RngStream s = RngStream::for_path(10, "validate", 0);
  const CoefficientSet cubic = builtin_coefficients("cubic_monotone");
  const gsde::RegularityReport ok = gsde::check_monotone(
      cubic, {-3.0, 3.0}, 20000, s, cubic.declared.at("monotone_K"),
      cubic.declared.at("coercivity_K"));
  CHECK(ok.pass);

  CoefficientSet growing;
  growing.b = [](double, double x) { return x * x; };
  growing.h = [](double, double) { return 0.0; };
  growing.sigma = [](double, double) { return 1.0; };
  growing.class_tag = gsde::CoeffClass::Monotone;
  const gsde::RegularityReport bad =
      gsde::check_monotone(growing, {-3.0, 3.0}, 20000, s, 0.0, 100.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violations > 0);
  CHECK_FALSE(bad.worst_example.empty());
}
