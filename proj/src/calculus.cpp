#include "gsde/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gsde/errors.hpp"

namespace gsde {

namespace {

void check_process(const GridProcess& p, const char* what) {
  GSDE_REQUIRE(ConstructionError, p.grid != nullptr,
               std::string(what) + " has no grid");
  GSDE_REQUIRE(ConstructionError, p.values.size() == p.grid->step_count + 1,
               std::string(what) + " length does not match its grid");
}

void check_shared(const GridProcess& eta, const GridProcess& x) {
  check_process(eta, "integrand");
  check_process(x, "integrator");
  GSDE_REQUIRE(ConstructionError, same_grid(*eta.grid, *x.grid),
               "integrand and integrator live on different grids");
}

}  // namespace

double sup_norm_diff(const GridProcess& a, const GridProcess& b) {
  GSDE_REQUIRE(ConstructionError, a.values.size() == b.values.size(),
               "sup_norm_diff needs equal-length processes");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  return worst;
}

double total_variation(const GridProcess& x) {
  check_process(x, "process");
  double tv = 0.0;
  for (std::size_t k = 0; k + 1 < x.values.size(); ++k)
    tv += std::abs(x.values[k + 1] - x.values[k]);
  return tv;
}

GridProcess ito_sum(const GridProcess& eta, const GridProcess& x) {
  check_shared(eta, x);
  GridProcess m{x.grid, std::vector<double>(x.values.size())};
  m.values[0] = 0.0;
  for (std::size_t k = 0; k + 1 < x.values.size(); ++k)
    m.values[k + 1] =
        m.values[k] + eta.values[k] * (x.values[k + 1] - x.values[k]);
  return m;
}

std::vector<std::size_t> stopping_partition(const GridProcess& eta,
                                            double epsilon) {
  check_process(eta, "integrand");
  GSDE_REQUIRE(ConstructionError, std::isfinite(epsilon) && epsilon > 0.0,
               "stopping_partition needs epsilon > 0");
  const std::size_t n = eta.grid->step_count;
  std::vector<std::size_t> stops{0};
  std::size_t anchor = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    if (std::abs(eta.values[t] - eta.values[anchor]) >= epsilon) {
      stops.push_back(t);
      anchor = t;
    }
  }
  if (stops.back() != n) stops.push_back(n);
  return stops;
}

GridProcess ito_epsilon(const GridProcess& eta, const GridProcess& x,
                        double epsilon) {
  check_shared(eta, x);
  const std::vector<std::size_t> stops = stopping_partition(eta, epsilon);
  GridProcess m{x.grid, std::vector<double>(x.values.size())};
  m.values[0] = 0.0;
  std::size_t pos = 0;
  double eta_anchor = eta.values[0];
  for (std::size_t k = 0; k + 1 < x.values.size(); ++k) {
    while (pos + 1 < stops.size() && stops[pos + 1] <= k) {
      ++pos;
      eta_anchor = eta.values[stops[pos]];
    }
    m.values[k + 1] =
        m.values[k] + eta_anchor * (x.values[k + 1] - x.values[k]);
  }
  return m;
}

IntegralResult ito_limsup(const GridProcess& eta, const GridProcess& x,
                          std::size_t n_max, double tol) {
  check_shared(eta, x);
  GSDE_REQUIRE(ConstructionError, n_max >= 2, "ito_limsup needs n_max >= 2");
  GSDE_REQUIRE(ConstructionError, std::isfinite(tol) && tol >= 0.0,
               "ito_limsup needs tol >= 0");
  const GridProcess ref = ito_sum(eta, x);
  IntegralResult out;
  GridProcess prev;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double eps = std::ldexp(1.0, -static_cast<int>(n));
    GridProcess cur = ito_epsilon(eta, x, eps);
    out.epsilon_used.push_back(eps);
    if (n > 1) out.cauchy_gaps.push_back(sup_norm_diff(cur, prev));
    const double err = sup_norm_diff(cur, ref);
    out.sup_errors.push_back(err);
    if (out.stabilized_at == 0 && err == 0.0) out.stabilized_at = n;
    prev = std::move(cur);
  }
  out.M = std::move(prev);
  out.converged = !out.cauchy_gaps.empty() && out.cauchy_gaps.back() <= tol;
  return out;
}

GridProcess qv_from_integral(const GridProcess& x) {
  check_process(x, "integrator");
  const GridProcess m = ito_sum(x, x);
  GridProcess out{x.grid, std::vector<double>(x.values.size())};
  const double x0_sq = x.values[0] * x.values[0];
  for (std::size_t k = 0; k < x.values.size(); ++k)
    out.values[k] = x.values[k] * x.values[k] - x0_sq - 2.0 * m.values[k];
  return out;
}

}  // namespace gsde
