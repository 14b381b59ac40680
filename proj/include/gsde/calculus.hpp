#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gsde/grid.hpp"

namespace gsde {

// A real-valued process observed at the grid points. Aggregate on purpose so
// driver and solution paths convert cheaply; every operation below validates
// shape on entry. Nothing in this module sees a measure: the operations are
// functions of path data alone.
struct GridProcess {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;
};

struct IntegralResult {
  GridProcess M;                     // last approximant, M^{2^-n_max}
  std::vector<double> epsilon_used;  // 2^-1 .. 2^-n_max
  std::vector<double> cauchy_gaps;   // sup|M^{2^-n} - M^{2^-(n-1)}|, n >= 2
  std::vector<double> sup_errors;    // sup|M^{2^-n} - ito_sum| per n
  bool converged = false;            // last cauchy gap <= declared tol
  std::size_t stabilized_at = 0;     // first n with sup error exactly 0; 0 = never
};

double sup_norm_diff(const GridProcess& a, const GridProcess& b);

// sum_k |X_{k+1} - X_k|
double total_variation(const GridProcess& x);

// Left-endpoint sum M_k = sum_{j<k} eta_j (X_{j+1} - X_j).
GridProcess ito_sum(const GridProcess& eta, const GridProcess& x);

// Stopping-time indices: tau_0 = 0, tau_{n+1} = first t > tau_n with
// |eta_t - eta_{tau_n}| >= epsilon, capped at N. Always ends at N.
std::vector<std::size_t> stopping_partition(const GridProcess& eta,
                                            double epsilon);

// M^eps_t = sum_n eta_{tau_n} (X_{tau_{n+1} ^ t} - X_{tau_n ^ t}), accumulated
// one grid step at a time so that a fully refined partition reproduces
// ito_sum bit for bit.
GridProcess ito_epsilon(const GridProcess& eta, const GridProcess& x,
                        double epsilon);

// Runs M^{2^-n} for n = 1..n_max and records the Cauchy gaps. On a fixed grid
// the sequence stops moving once 2^-n is below the smallest nonzero step
// oscillation of eta, and stabilized_at records where that happened.
IntegralResult ito_limsup(const GridProcess& eta, const GridProcess& x,
                          std::size_t n_max = 20, double tol = 0.0);

// <X>_k = X_k^2 - X_0^2 - 2 * ito_sum(X, X)_k, the quadratic variation via
// the integration identity; equals the cumulative squared-increment sequence
// up to floating rounding.
GridProcess qv_from_integral(const GridProcess& x);

}  // namespace gsde
