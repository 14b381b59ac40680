#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "gsde/errors.hpp"
#include "gsde/grid.hpp"
#include "gsde/measures.hpp"
#include "gsde/rng.hpp"

using gsde::make_grid;
using gsde::make_grid_shared;
using gsde::Member;
using gsde::MeasureFamily;
using gsde::RngStream;
using gsde::VolatilitySpec;

namespace {

double mean_terminal_driver(const VolatilitySpec& spec, std::size_t n,
                            std::uint64_t seed,
                            double (*f)(double) = nullptr) {
  const auto grid = make_grid_shared(1.0, 32);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const gsde::DriverPath p = gsde::sample_driver(
        spec, grid, RngStream::for_path(seed, "m", i), {"m", seed, i});
    sum += f ? f(p.values.back()) : p.values.back();
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(VolatilitySpec::constant(0.0), gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::constant(-1.0), gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::piecewise({0.5}, {1.0}),
                  gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::piecewise({0.5, 0.4}, {1.0, 2.0, 3.0}),
                  gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::regime_switching({}, 0.1),
                  gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::regime_switching({1.0, 2.0}, 1.5),
                  gsde::ConstructionError);
  CHECK_THROWS_AS(VolatilitySpec::mixture(VolatilitySpec::constant(1.0),
                                          VolatilitySpec::constant(4.0), -0.1),
                  gsde::ConstructionError);
}

TEST_CASE("bounds bracket every kind") {
  CHECK(VolatilitySpec::constant(4.0).bounds().lower == 4.0);
  CHECK(VolatilitySpec::constant(4.0).bounds().upper == 4.0);

  const VolatilitySpec pw = VolatilitySpec::piecewise({0.5}, {1.0, 9.0});
  CHECK(pw.bounds().lower == 1.0);
  CHECK(pw.bounds().upper == 9.0);

  const VolatilitySpec mix = VolatilitySpec::mixture(
      VolatilitySpec::constant(1.0), VolatilitySpec::constant(4.0), 0.5);
  CHECK(mix.bounds().lower == 1.0);
  CHECK(mix.bounds().upper == 4.0);
}

TEST_CASE("family requires members and unique ids") {
  CHECK_THROWS_AS(MeasureFamily({}), gsde::ConstructionError);
  CHECK_THROWS_AS(MeasureFamily({{"p", VolatilitySpec::constant(1.0)},
                                 {"p", VolatilitySpec::constant(4.0)}}),
                  gsde::ConstructionError);
  const MeasureFamily fam({{"p", VolatilitySpec::constant(1.0)},
                           {"q", VolatilitySpec::constant(4.0)}});
  CHECK(fam.envelope().lower == 1.0);
  CHECK(fam.envelope().upper == 4.0);
  CHECK(fam.find("q") != nullptr);
  CHECK(fam.find("r") == nullptr);
}

TEST_CASE("vol samples stay inside the declared bounds") {
  const auto grid = make_grid(1.0, 64);
  const VolatilitySpec specs[] = {
      VolatilitySpec::constant(2.0),
      VolatilitySpec::piecewise({0.25, 0.5}, {1.0, 3.0, 2.0}),
      VolatilitySpec::regime_switching({1.0, 4.0, 9.0}, 0.2),
      VolatilitySpec::mixture(VolatilitySpec::constant(1.0),
                              VolatilitySpec::regime_switching({2.0, 4.0}, 0.1),
                              0.3),
  };
  for (const VolatilitySpec& spec : specs) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      const gsde::VolSample vs =
          gsde::sample_vol_path(spec, grid, RngStream::for_path(3, "b", i));
      REQUIRE(vs.mu.size() == grid.step_count);
      for (double m : vs.mu) {
        CHECK(m >= spec.bounds().lower);
        CHECK(m <= spec.bounds().upper);
      }
    }
  }
}

TEST_CASE("piecewise schedule switches at its breakpoints") {
  const auto grid = make_grid(1.0, 8);
  const VolatilitySpec pw = VolatilitySpec::piecewise({0.5}, {1.0, 9.0});
  const gsde::VolSample vs =
      gsde::sample_vol_path(pw, grid, RngStream::for_path(1, "pw", 0));
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(vs.mu[k] == (grid.points[k] < 0.5 ? 1.0 : 9.0));
}

TEST_CASE("regime draws hop only between listed states") {
  const auto grid = make_grid(1.0, 256);
  const VolatilitySpec rs = VolatilitySpec::regime_switching({1.0, 4.0}, 0.5);
  bool saw_low = false, saw_high = false, switched = false;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const gsde::VolSample vs =
        gsde::sample_vol_path(rs, grid, RngStream::for_path(17, "rs", i));
    for (std::size_t k = 0; k < vs.mu.size(); ++k) {
      CHECK((vs.mu[k] == 1.0 || vs.mu[k] == 4.0));
      saw_low |= vs.mu[k] == 1.0;
      saw_high |= vs.mu[k] == 4.0;
      if (k > 0 && vs.mu[k] != vs.mu[k - 1]) switched = true;
    }
  }
  CHECK(saw_low);
  CHECK(saw_high);
  CHECK(switched);
}

TEST_CASE("a mixture draw reproduces its component draw bit for bit") {
  const auto grid = make_grid(1.0, 64);
  const VolatilitySpec left = VolatilitySpec::regime_switching({1.0, 2.0}, 0.2);
  const VolatilitySpec right = VolatilitySpec::constant(4.0);
  const VolatilitySpec mix = VolatilitySpec::mixture(left, right, 0.5);
  bool saw_left = false, saw_right = false;
  for (std::uint64_t i = 0; i < 40; ++i) {
    RngStream stream = RngStream::for_path(23, "mx", i);
    const gsde::VolSample got = gsde::sample_vol_path(mix, grid, stream);
    const VolatilitySpec& component =
        got.branch_tag == "left" ? left : right;
    const gsde::VolSample expect = gsde::sample_vol_path(
        component, grid, stream.sub("mixture_component"));
    CHECK(got.mu == expect.mu);
    saw_left |= got.branch_tag == "left";
    saw_right |= got.branch_tag == "right";
  }
  CHECK(saw_left);
  CHECK(saw_right);
}

TEST_CASE("driver paths satisfy their construction identities") {
  const auto grid = make_grid_shared(2.0, 128);
  const VolatilitySpec spec = VolatilitySpec::regime_switching({1.0, 4.0}, 0.1);
  const gsde::DriverPath p = gsde::sample_driver(
      spec, grid, RngStream::for_path(5, "d", 2), {"d", 5, 2});
  REQUIRE(p.values.size() == 129);
  REQUIRE(p.vol_record.size() == 128);
  REQUIRE(p.qv_pathwise.size() == 129);
  CHECK(p.values[0] == 0.0);
  CHECK(p.qv_pathwise[0] == 0.0);
  CHECK(p.provenance.key() == "d:5:2");
  double qv = 0.0;
  for (std::size_t k = 0; k < 128; ++k) {
    const double db = p.values[k + 1] - p.values[k];
    qv += db * db;
    CHECK(p.qv_pathwise[k + 1] == doctest::Approx(qv).epsilon(1e-14));
  }
}

TEST_CASE("identical sampling coordinates reproduce the driver bitwise") {
  const auto grid = make_grid_shared(1.0, 64);
  const VolatilitySpec spec = VolatilitySpec::mixture(
      VolatilitySpec::constant(1.0), VolatilitySpec::constant(4.0), 0.5);
  const gsde::DriverPath a = gsde::sample_driver(
      spec, grid, RngStream::for_path(9, "r", 4), {"r", 9, 4});
  const gsde::DriverPath b = gsde::sample_driver(
      spec, grid, RngStream::for_path(9, "r", 4), {"r", 9, 4});
  CHECK(a.values == b.values);
  CHECK(a.vol_record == b.vol_record);
  CHECK(a.qv_pathwise == b.qv_pathwise);
  CHECK(a.branch_tag == b.branch_tag);
}

TEST_CASE("driver terminal mean vanishes under members and averages") {
  const VolatilitySpec p = VolatilitySpec::constant(1.0);
  const VolatilitySpec q = VolatilitySpec::constant(4.0);
  const VolatilitySpec avg = gsde::average_measure(p, q);
  const std::size_t n = 20000;
  const double bound = 3.0 * std::sqrt(4.0) * std::sqrt(1.0 / n);
  CHECK(std::abs(mean_terminal_driver(p, n, 101)) <= bound);
  CHECK(std::abs(mean_terminal_driver(q, n, 102)) <= bound);
  CHECK(std::abs(mean_terminal_driver(avg, n, 103)) <= bound);
}

TEST_CASE("average measure mixes the component QV laws evenly") {
  const VolatilitySpec avg = gsde::average_measure(
      VolatilitySpec::constant(1.0), VolatilitySpec::constant(4.0));
  CHECK(avg.kind() == VolatilitySpec::Kind::Mixture);
  CHECK(avg.weight() == 0.5);
  CHECK(avg.bounds().lower == 1.0);
  CHECK(avg.bounds().upper == 4.0);
  const double mean_sq = mean_terminal_driver(
      avg, 20000, 104, [](double b) { return b * b; });
  CHECK(mean_sq == doctest::Approx(2.5).epsilon(0.08));
}

TEST_CASE("parallel batches match the serial reference bitwise") {
  const auto grid = make_grid_shared(1.0, 64);
  const Member member{"rs", VolatilitySpec::regime_switching({1.0, 4.0}, 0.1)};
  const auto serial = gsde::sample_batch_serial(member, grid, 257, 77);
  const auto par1 = gsde::sample_batch(member, grid, 257, 77, 1);
  const auto par4 = gsde::sample_batch(member, grid, 257, 77, 4);
  REQUIRE(serial.size() == 257);
  REQUIRE(par4.size() == 257);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].values == par1[i].values);
    CHECK(serial[i].values == par4[i].values);
    CHECK(serial[i].vol_record == par4[i].vol_record);
    CHECK(serial[i].provenance.key() == par4[i].provenance.key());
  }
}

TEST_CASE("describe names the kind") {
  CHECK(VolatilitySpec::constant(4.0).describe() == "Constant(4)");
  CHECK(VolatilitySpec::regime_switching({1.0, 4.0}, 0.1).describe().find(
            "RegimeSwitching") != std::string::npos);
}
