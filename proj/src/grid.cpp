#include "gsde/grid.hpp"

#include "gsde/errors.hpp"

namespace gsde {

TimeGrid make_grid(double horizon, std::size_t step_count) {
  GSDE_REQUIRE(ConstructionError, horizon > 0.0, "grid horizon must be positive");
  GSDE_REQUIRE(ConstructionError, step_count >= 1, "grid step count must be >= 1");

  TimeGrid grid;
  grid.horizon = horizon;
  grid.step_count = step_count;
  grid.points.resize(step_count + 1);
  for (std::size_t k = 0; k <= step_count; ++k) {
    grid.points[k] = (horizon * static_cast<double>(k)) / static_cast<double>(step_count);
  }
  grid.points.back() = horizon;  // pin the endpoint exactly
  return grid;
}

std::shared_ptr<const TimeGrid> make_grid_shared(double horizon, std::size_t step_count) {
  return std::make_shared<const TimeGrid>(make_grid(horizon, step_count));
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) noexcept {
  return a.horizon == b.horizon && a.step_count == b.step_count;
}

}  // namespace gsde
