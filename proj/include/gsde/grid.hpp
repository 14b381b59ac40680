#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace gsde {

// Uniform discretization of [0, T] with N steps.
struct TimeGrid {
  double horizon = 0.0;
  std::size_t step_count = 0;
  std::vector<double> points;  // t_0 = 0 < t_1 < ... < t_N = T

  double dt() const noexcept { return horizon / static_cast<double>(step_count); }
};

TimeGrid make_grid(double horizon, std::size_t step_count);
std::shared_ptr<const TimeGrid> make_grid_shared(double horizon, std::size_t step_count);

// Value equality of the discretization (not object identity).
bool same_grid(const TimeGrid& a, const TimeGrid& b) noexcept;

}  // namespace gsde
