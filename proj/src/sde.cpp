#include "gsde/sde.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gsde/errors.hpp"
#include "gsde/format.hpp"

namespace gsde {

namespace {

void check_coeffs(const CoefficientSet& c) {
  GSDE_REQUIRE(ConstructionError, c.b && c.h && c.sigma,
               "coefficient set must define b, h, and sigma");
}

void check_driver(const DriverPath& d) {
  GSDE_REQUIRE(ConstructionError, d.grid != nullptr, "driver has no grid");
  const std::size_t n = d.grid->step_count;
  GSDE_REQUIRE(ConstructionError,
               d.values.size() == n + 1 && d.vol_record.size() == n,
               "driver arrays do not match its grid");
}

struct SamplePair {
  double t, x, y;
};

std::vector<SamplePair> sample_pairs(Interval dom, std::size_t n_pairs,
                                     RngStream& stream) {
  GSDE_REQUIRE(ConstructionError,
               std::isfinite(dom.lo) && std::isfinite(dom.hi) && dom.lo < dom.hi,
               "validator domain must be a finite interval");
  GSDE_REQUIRE(ConstructionError, n_pairs >= 1,
               "validators need at least one sample pair");
  const double span = dom.hi - dom.lo;
  std::vector<SamplePair> out;
  out.reserve(n_pairs + 78);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const double t = stream.next_uniform();
    const double x = dom.lo + span * stream.next_uniform();
    double y;
    if (i % 2 == 0) {
      y = dom.lo + span * stream.next_uniform();
    } else {
      y = std::clamp(x + span * 1e-6 * (stream.next_uniform() - 0.5), dom.lo,
                     dom.hi);
    }
    out.push_back({t, x, y});
  }
  // Dyadic probes pinned to the endpoints: quotients of root-type
  // coefficients blow up along (lo + d, lo + 4d) as d -> 0.
  for (int j = 2; j <= 40; ++j) {
    const double d = std::ldexp(span, -j);
    out.push_back({0.0, dom.lo + d, dom.lo + 4.0 * d});
    out.push_back({0.0, dom.hi - d, dom.hi - 4.0 * d});
  }
  return out;
}

std::string pair_text(const char* coeff, double value, const SamplePair& p) {
  return std::string(coeff) + "=" + format_double(value) +
         " at x=" + format_double(p.x) + ", y=" + format_double(p.y) +
         ", t=" + format_double(p.t);
}

}  // namespace

double euler_step(const CoefficientSet& coeffs, double t, double x, double dt,
                  double d_qv, double db) {
  return x + coeffs.b(t, x) * dt + coeffs.h(t, x) * d_qv +
         coeffs.sigma(t, x) * db;
}

std::vector<double> solve_strong_range(const CoefficientSet& coeffs, double x0,
                                       const DriverPath& driver, QvMode mode,
                                       std::size_t k_begin, std::size_t k_end) {
  check_coeffs(coeffs);
  check_driver(driver);
  GSDE_REQUIRE(ConstructionError,
               k_begin <= k_end && k_end <= driver.grid->step_count,
               "solve range outside the grid");
  GSDE_REQUIRE(ConstructionError, std::isfinite(x0),
               "initial state must be finite");
  const double dt = driver.grid->dt();
  std::vector<double> x(k_end - k_begin + 1);
  x[0] = x0;
  for (std::size_t k = k_begin; k < k_end; ++k) {
    const double db = driver.values[k + 1] - driver.values[k];
    const double d_qv =
        mode == QvMode::Pathwise ? db * db : driver.vol_record[k] * dt;
    const double next = euler_step(coeffs, driver.grid->points[k],
                                   x[k - k_begin], dt, d_qv, db);
    if (!std::isfinite(next))
      throw BlowUpError(k + 1, driver.provenance.key());
    x[k - k_begin + 1] = next;
  }
  return x;
}

SolutionPath solve_strong(const CoefficientSet& coeffs, double x0,
                          const DriverPath& driver, QvMode mode) {
  SolutionPath s;
  s.grid = driver.grid;
  s.x0 = x0;
  s.driver_ref = driver.provenance;
  s.measure_id = driver.provenance.measure_id;
  s.qv_mode = mode;
  s.values =
      solve_strong_range(coeffs, x0, driver, mode, 0, driver.grid->step_count);
  return s;
}

double max_euler_residual(const CoefficientSet& coeffs,
                          const DriverPath& driver, const SolutionPath& sol) {
  check_coeffs(coeffs);
  check_driver(driver);
  GSDE_REQUIRE(ConstructionError,
               sol.grid != nullptr && same_grid(*sol.grid, *driver.grid) &&
                   sol.values.size() == driver.values.size(),
               "solution and driver live on different grids");
  const double dt = driver.grid->dt();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < sol.values.size(); ++k) {
    const double db = driver.values[k + 1] - driver.values[k];
    const double d_qv = sol.qv_mode == QvMode::Pathwise
                            ? db * db
                            : driver.vol_record[k] * dt;
    const double expected = euler_step(coeffs, driver.grid->points[k],
                                       sol.values[k], dt, d_qv, db);
    worst = std::max(worst, std::abs(sol.values[k + 1] - expected));
  }
  return worst;
}

RegularityReport check_lipschitz(const CoefficientSet& coeffs, Interval domain,
                                 std::size_t n_pairs, RngStream stream,
                                 double declared_k, double tolerance) {
  check_coeffs(coeffs);
  GSDE_REQUIRE(ConstructionError, declared_k >= 0.0 && tolerance >= 0.0,
               "declared constant and tolerance must be nonnegative");
  const auto pairs = sample_pairs(domain, n_pairs, stream);
  const std::array<std::pair<const char*,
                             const std::function<double(double, double)>*>, 3>
      maps = {{{"b", &coeffs.b}, {"h", &coeffs.h}, {"sigma", &coeffs.sigma}}};

  RegularityReport rep;
  rep.class_tag = CoeffClass::Lipschitz;
  rep.sample_count = pairs.size();
  const double limit = declared_k * (1.0 + tolerance);
  double overall = 0.0;
  double worst_ratio = -1.0;
  for (const auto& [label, fn] : maps) {
    double est = 0.0;
    for (const SamplePair& p : pairs) {
      if (p.x == p.y) continue;
      const double ratio =
          std::abs((*fn)(p.t, p.x) - (*fn)(p.t, p.y)) / std::abs(p.x - p.y);
      est = std::max(est, ratio);
      if (ratio > limit) {
        ++rep.violations;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          rep.worst_example = pair_text(
              (std::string("|") + label + "(x)-" + label + "(y)|/|x-y|").c_str(),
              ratio, p);
        }
      }
    }
    rep.constants[std::string("K_") + label] = est;
    overall = std::max(overall, est);
  }
  rep.constants["K"] = overall;
  rep.constants["declared_K"] = declared_k;
  rep.pass = rep.violations == 0;
  return rep;
}

RegularityReport check_yamada_watanabe(const CoefficientSet& coeffs,
                                       double alpha, Interval domain,
                                       std::size_t n_pairs, RngStream stream,
                                       double tolerance) {
  check_coeffs(coeffs);
  GSDE_REQUIRE(ConstructionError, std::isfinite(alpha) && alpha > 0.0,
               "Yamada-Watanabe exponent must be positive");
  GSDE_REQUIRE(ConstructionError, coeffs.class_tag == CoeffClass::YamadaWatanabe,
               "coefficient set is not tagged YamadaWatanabe");
  const auto pairs = sample_pairs(domain, n_pairs, stream);

  RegularityReport rep;
  rep.class_tag = CoeffClass::YamadaWatanabe;
  rep.sample_count = pairs.size();

  // int_0^eps u^(-2 alpha) du = infinity exactly when 2 alpha >= 1.
  const bool diverges = alpha >= 0.5;
  if (!diverges) {
    ++rep.violations;
    rep.worst_example = "integral of rho^-2 converges at 0 for alpha=" +
                        format_double(alpha);
  }

  double est_c = 0.0;
  double worst_excess = -1.0;
  std::size_t modulus_violations = 0;
  for (const SamplePair& p : pairs) {
    if (p.x == p.y) continue;
    const double diff = std::abs(coeffs.sigma(p.t, p.x) - coeffs.sigma(p.t, p.y));
    const double rho = std::pow(std::abs(p.x - p.y), alpha);
    est_c = std::max(est_c, diff / rho);
    if (diff > rho * (1.0 + tolerance)) {
      ++modulus_violations;
      if (diff / rho > worst_excess) {
        worst_excess = diff / rho;
        rep.worst_example =
            pair_text("|sigma(x)-sigma(y)|/rho(|x-y|)", diff / rho, p);
      }
    }
  }
  rep.violations += modulus_violations;
  rep.constants["alpha"] = alpha;
  rep.constants["C_rho"] = est_c;
  rep.sub_verdicts.emplace_back("integral_divergence", diverges);
  rep.sub_verdicts.emplace_back("modulus_bound", modulus_violations == 0);
  rep.pass = rep.violations == 0;
  return rep;
}

RegularityReport check_monotone(const CoefficientSet& coeffs, Interval domain,
                                std::size_t n_pairs, RngStream stream,
                                double declared_k_mono, double declared_k_coer,
                                double tolerance) {
  check_coeffs(coeffs);
  GSDE_REQUIRE(ConstructionError, tolerance >= 0.0,
               "tolerance must be nonnegative");
  const auto pairs = sample_pairs(domain, n_pairs, stream);

  RegularityReport rep;
  rep.class_tag = CoeffClass::Monotone;
  rep.sample_count = pairs.size();

  double est_mono = 0.0;
  double est_coer = 0.0;
  double worst_excess = -1.0;
  std::size_t mono_violations = 0;
  std::size_t coer_violations = 0;
  for (const SamplePair& p : pairs) {
    if (p.x != p.y) {
      const double d = p.x - p.y;
      const double sdiff = coeffs.sigma(p.t, p.x) - coeffs.sigma(p.t, p.y);
      const double lhs =
          2.0 * d * (coeffs.b(p.t, p.x) - coeffs.b(p.t, p.y)) + sdiff * sdiff;
      est_mono = std::max(est_mono, lhs / (d * d));
      if (lhs > declared_k_mono * d * d * (1.0 + tolerance)) {
        ++mono_violations;
        if (lhs / (d * d) > worst_excess) {
          worst_excess = lhs / (d * d);
          rep.worst_example = pair_text("monotone form / (x-y)^2",
                                        lhs / (d * d), p);
        }
      }
    }
    const double s = coeffs.sigma(p.t, p.x);
    const double growth = 2.0 * p.x * coeffs.b(p.t, p.x) + s * s;
    const double bound = 1.0 + p.x * p.x;
    est_coer = std::max(est_coer, growth / bound);
    if (growth > declared_k_coer * bound * (1.0 + tolerance)) ++coer_violations;
  }
  rep.violations = mono_violations + coer_violations;
  rep.constants["monotone_K"] = est_mono;
  rep.constants["coercivity_K"] = est_coer;
  rep.constants["declared_monotone_K"] = declared_k_mono;
  rep.constants["declared_coercivity_K"] = declared_k_coer;
  rep.sub_verdicts.emplace_back("monotonicity", mono_violations == 0);
  rep.sub_verdicts.emplace_back("coercivity", coer_violations == 0);
  rep.pass = rep.violations == 0;
  return rep;
}

CoefficientSet builtin_coefficients(const std::string& name,
                                    const std::map<std::string, double>& params) {
  auto remaining = params;
  auto take = [&remaining](const char* key, double def) {
    auto it = remaining.find(key);
    if (it == remaining.end()) return def;
    const double v = it->second;
    remaining.erase(it);
    return v;
  };
  auto finish = [&remaining, &name](CoefficientSet c) {
    GSDE_REQUIRE(ConstructionError, remaining.empty(),
                 "unknown parameter '" +
                     (remaining.empty() ? "" : remaining.begin()->first) +
                     "' for builtin '" + name + "'");
    c.name = name;
    return c;
  };
  const auto zero = [](double, double) { return 0.0; };

  if (name == "gbm") {
    const double mu = take("mu", 0.05);
    const double nu = take("nu", 0.2);
    CoefficientSet c;
    c.b = [mu](double, double x) { return mu * x; };
    c.h = zero;
    c.sigma = [nu](double, double x) { return nu * x; };
    c.class_tag = CoeffClass::Lipschitz;
    c.params = {{"mu", mu}, {"nu", nu}};
    c.declared = {{"lipschitz_K", std::max(std::abs(mu), std::abs(nu))}};
    return finish(std::move(c));
  }
  if (name == "qv_drift_gbm") {
    const double mu = take("mu", 0.05);
    const double eta = take("eta", 0.1);
    const double nu = take("nu", 0.2);
    CoefficientSet c;
    c.b = [mu](double, double x) { return mu * x; };
    c.h = [eta](double, double x) { return eta * x; };
    c.sigma = [nu](double, double x) { return nu * x; };
    c.class_tag = CoeffClass::Lipschitz;
    c.params = {{"mu", mu}, {"eta", eta}, {"nu", nu}};
    c.declared = {{"lipschitz_K", std::max({std::abs(mu), std::abs(eta),
                                            std::abs(nu)})}};
    return finish(std::move(c));
  }
  if (name == "sqrt_diffusion") {
    const double alpha = take("alpha", 0.5);
    GSDE_REQUIRE(ConstructionError, alpha > 0.0 && alpha <= 1.0,
                 "sqrt_diffusion needs alpha in (0,1]");
    CoefficientSet c;
    c.b = zero;
    c.h = zero;
    c.sigma = [alpha](double, double x) { return std::pow(std::abs(x), alpha); };
    c.class_tag = CoeffClass::YamadaWatanabe;
    c.alpha = alpha;
    c.params = {{"alpha", alpha}};
    return finish(std::move(c));
  }
  if (name == "cubic_monotone") {
    const double sigma0 = take("sigma0", 1.0);
    CoefficientSet c;
    c.b = [](double, double x) { return -(x * x * x); };
    c.h = zero;
    c.sigma = [sigma0](double, double) { return sigma0; };
    c.class_tag = CoeffClass::Monotone;
    c.params = {{"sigma0", sigma0}};
    c.declared = {{"monotone_K", 0.0}, {"coercivity_K", sigma0 * sigma0}};
    return finish(std::move(c));
  }
  if (name == "stochvol") {
    const double mu = take("mu", 0.05);
    CoefficientSet c;
    c.b = [mu](double, double x) { return mu * x; };
    c.h = zero;
    c.sigma = [](double, double x) { return x; };  // vol carried by mu_t
    c.class_tag = CoeffClass::StochVol;
    c.params = {{"mu", mu}};
    c.declared = {{"lipschitz_K", std::max(std::abs(mu), 1.0)}};
    return finish(std::move(c));
  }
  throw ConstructionError("unknown builtin coefficient set '" + name + "'");
}

}  // namespace gsde
