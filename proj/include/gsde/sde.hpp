#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gsde/grid.hpp"
#include "gsde/measures.hpp"
#include "gsde/rng.hpp"

namespace gsde {

enum class CoeffClass { Lipschitz, YamadaWatanabe, Monotone, StochVol };

// Coefficients of dX = b dt + h d<B> + sigma dB. The maps take (t, x).
// declared holds the regularity constants the validators test against
// (e.g. "lipschitz_K", "monotone_K", "coercivity_K").
struct CoefficientSet {
  std::function<double(double, double)> b;
  std::function<double(double, double)> h;
  std::function<double(double, double)> sigma;
  CoeffClass class_tag = CoeffClass::Lipschitz;
  double alpha = 1.0;  // YamadaWatanabe modulus exponent
  std::string name;
  std::map<std::string, double> params;
  std::map<std::string, double> declared;
};

enum class QvMode { Pathwise, Generator };

struct SolutionPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;
  double x0 = 0.0;
  PathProvenance driver_ref;
  std::string measure_id;  // carried for bookkeeping, never read by the solver
  QvMode qv_mode = QvMode::Pathwise;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RegularityReport {
  CoeffClass class_tag = CoeffClass::Lipschitz;
  std::map<std::string, double> constants;  // estimated and declared
  std::size_t sample_count = 0;
  std::size_t violations = 0;
  std::string worst_example;
  std::vector<std::pair<std::string, bool>> sub_verdicts;
  bool pass = false;  // pass <=> violations == 0 and every sub-verdict holds
};

// One Euler update x + b dt + h d_qv + sigma db with a fixed evaluation
// order. The solver and the residual checker both call this, which is what
// makes residuals on stored solutions exactly zero.
double euler_step(const CoefficientSet& coeffs, double t, double x, double dt,
                  double d_qv, double db);

// Euler scheme along the driver. In Pathwise mode d<B>_k = (dB_k)^2, so the
// solution is a function of the driver values alone; Generator mode feeds
// mu_k dt instead. Non-finite states raise a blow-up error naming the step.
SolutionPath solve_strong(const CoefficientSet& coeffs, double x0,
                          const DriverPath& driver,
                          QvMode mode = QvMode::Pathwise);

// Same scheme restricted to steps [k_begin, k_end), starting from x0 at
// t_{k_begin}. solve_strong runs through this, so solving [0,N] equals
// solving [0,M] then restarting from X_M, bit for bit.
std::vector<double> solve_strong_range(const CoefficientSet& coeffs, double x0,
                                       const DriverPath& driver, QvMode mode,
                                       std::size_t k_begin, std::size_t k_end);

// max_k |X_{k+1} - euler_step(...)| recomputed from the stored solution and
// its driver; exactly 0 for anything solve_strong produced.
double max_euler_residual(const CoefficientSet& coeffs,
                          const DriverPath& driver, const SolutionPath& sol);

// Sampling-based falsifiers for the coefficient classes. Pass means "no
// violation found at the declared constant and tolerance", not a proof.
// Pairs are drawn uniformly over the domain, as close pairs, and as dyadic
// probes (lo + d, lo + 4d) pinned to the endpoints to catch blow-ups of the
// difference quotient; t is sampled in [0,1].
RegularityReport check_lipschitz(const CoefficientSet& coeffs, Interval domain,
                                 std::size_t n_pairs, RngStream stream,
                                 double declared_k, double tolerance = 0.01);

// Divergence criterion for rho(u) = u^alpha (integral of rho^-2 diverges at
// 0 iff alpha >= 1/2) plus a sampled |sigma(x)-sigma(y)| <= rho(|x-y|) bound;
// both sub-verdicts are recorded and both must hold.
RegularityReport check_yamada_watanabe(const CoefficientSet& coeffs,
                                       double alpha, Interval domain,
                                       std::size_t n_pairs, RngStream stream,
                                       double tolerance = 0.01);

// Monotonicity 2(x-y)(b(x)-b(y)) + (sigma(x)-sigma(y))^2 <= K_mono (x-y)^2
// and coercivity 2 x b(x) + sigma(x)^2 <= K_coer (1 + x^2) on sampled
// pairs/points.
RegularityReport check_monotone(const CoefficientSet& coeffs, Interval domain,
                                std::size_t n_pairs, RngStream stream,
                                double declared_k_mono, double declared_k_coer,
                                double tolerance = 0.01);

// Catalog: gbm(mu,nu), qv_drift_gbm(mu,eta,nu), sqrt_diffusion(alpha),
// cubic_monotone(sigma0), stochvol(mu). Unknown names or params are errors.
CoefficientSet builtin_coefficients(const std::string& name,
                                    const std::map<std::string, double>& params = {});

}  // namespace gsde
