// Times the parallel kernels against their serial references and verifies
// the results match bit for bit, which is the contract the block-merge and
// per-path stream design is supposed to buy.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gsde/gexpect.hpp"
#include "gsde/grid.hpp"
#include "gsde/measures.hpp"
#include "gsde/parallel.hpp"
#include "gsde/sde.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double>(dt).count();
}

bool same_batch(const std::vector<gsde::DriverPath>& a,
                const std::vector<gsde::DriverPath>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].values != b[i].values) return false;
    if (a[i].vol_record != b[i].vol_record) return false;
    if (a[i].qv_pathwise != b[i].qv_pathwise) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel benchmark"};
  std::size_t n_paths = 20000;
  std::size_t steps = 256;
  int threads = 0;
  std::uint64_t seed = 20260815;
  app.add_option("--paths", n_paths, "Paths per kernel");
  app.add_option("--steps", steps, "Grid steps");
  app.add_option("--threads", threads, "Parallel width, 0 = all cores");
  app.add_option("--seed", seed, "Master seed");
  CLI11_PARSE(app, argc, argv);

  const int width = gsde::resolve_threads(threads);
  const auto grid = gsde::make_grid_shared(1.0, steps);
  const gsde::Member member{
      "p", gsde::VolatilitySpec::regime_switching({1.0, 4.0}, 0.05)};
  const gsde::MeasureFamily family({member});
  const gsde::CoefficientSet coeffs = gsde::builtin_coefficients("gbm");
  const gsde::Functional payoff = gsde::Functional::terminal(
      [](double x) { return x > 1.0 ? x - 1.0 : 0.0; }, "call strike 1");

  std::printf("paths=%zu steps=%zu threads=%d\n", n_paths, steps, width);

  auto t0 = std::chrono::steady_clock::now();
  const auto serial_batch =
      gsde::sample_batch_serial(member, grid, n_paths, seed);
  const double t_sample_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel_batch =
      gsde::sample_batch(member, grid, n_paths, seed, threads);
  const double t_sample_parallel = seconds_since(t0);

  const bool sample_match = same_batch(serial_batch, parallel_batch);
  std::printf("sample_batch   serial %8.4fs  parallel %8.4fs  speedup %5.2fx  %s\n",
              t_sample_serial, t_sample_parallel,
              t_sample_serial / t_sample_parallel,
              sample_match ? "bitwise match" : "MISMATCH");

  gsde::EstimateOptions opts;
  opts.threads = 1;
  t0 = std::chrono::steady_clock::now();
  const gsde::Estimate est_serial = gsde::estimate(
      member, &coeffs, 1.0, payoff, grid, n_paths, seed, opts);
  const double t_est_serial = seconds_since(t0);

  opts.threads = threads;
  t0 = std::chrono::steady_clock::now();
  const gsde::Estimate est_parallel = gsde::estimate(
      member, &coeffs, 1.0, payoff, grid, n_paths, seed, opts);
  const double t_est_parallel = seconds_since(t0);

  const bool est_match = est_serial.mean == est_parallel.mean &&
                         est_serial.std_error == est_parallel.std_error;
  std::printf("estimate       serial %8.4fs  parallel %8.4fs  speedup %5.2fx  %s\n",
              t_est_serial, t_est_parallel, t_est_serial / t_est_parallel,
              est_match ? "bitwise match" : "MISMATCH");
  std::printf("estimate mean %.17g stderr %.17g\n", est_parallel.mean,
              est_parallel.std_error);

  return sample_match && est_match ? 0 : 1;
}
