#include "mcflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcflow/error.hpp"

namespace mcflow {

GridSpec GridSpec::unit_box(int n) {
  GridSpec g{-0.5, 0.5, -0.5, 0.5, n};
  g.validate();
  return g;
}

GridSpec GridSpec::with_spacing(const GridSpec& box, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  GridSpec g = box;
  g.n = std::max(1, static_cast<int>(std::lround((box.x_max - box.x_min) / h)));
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (n <= 0) throw InvalidArgument("grid needs at least one cell per side");
  const double wx = x_max - x_min;
  const double wy = y_max - y_min;
  if (!(wx > 0.0) || !(wy > 0.0)) throw InvalidArgument("grid box has non-positive extent");
  if (std::abs(wx - wy) > 1e-12 * std::max(wx, wy))
    throw InvalidArgument("grid cells must be square (box must be square)");
}

bool GridSpec::same_box(const GridSpec& other) const noexcept {
  const double tol = 1e-12 * std::max(1.0, x_max - x_min);
  return std::abs(x_min - other.x_min) <= tol && std::abs(x_max - other.x_max) <= tol &&
         std::abs(y_min - other.y_min) <= tol && std::abs(y_max - other.y_max) <= tol;
}

Field::Field(const GridSpec& grid, double value) : grid_(grid) {
  grid_.validate();
  if (!std::isfinite(value)) throw NonFiniteValue("field fill value is not finite");
  values_.assign(grid_.node_count(), value);
}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.node_count())
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid has " +
                          std::to_string(grid_.node_count()) + " nodes");
  if (!all_finite()) throw NonFiniteValue("field contains NaN or Inf");
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context) {
  if (!(a == b)) throw GridMismatch(std::string(context) + ": fields live on different grids");
}

}  // namespace mcflow
