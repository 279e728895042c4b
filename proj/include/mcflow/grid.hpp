#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcflow {

/// Uniform square-cell grid over a rectangle, n cells per dimension.
///
/// Nodes are numbered row by row: index(i, j) = j * (n + 1) + i, with i along x.
struct GridSpec {
  double x_min = -0.5;
  double x_max = 0.5;
  double y_min = -0.5;
  double y_max = 0.5;
  int n = 1;

  /// [-0.5, 0.5]^2 with n cells per side.
  static GridSpec unit_box(int n);

  /// Same box as `box`, cell count chosen as round(width / h).
  static GridSpec with_spacing(const GridSpec& box, double h);

  /// Throws InvalidArgument unless n > 0 and the cells are square.
  void validate() const;

  double h() const noexcept { return (x_max - x_min) / n; }
  int nodes_per_side() const noexcept { return n + 1; }
  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
  }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n + 1) +
           static_cast<std::size_t>(i);
  }
  double x(int i) const noexcept { return x_min + i * h(); }
  double y(int j) const noexcept { return y_min + j * h(); }

  /// Same box (to round-off) regardless of resolution.
  bool same_box(const GridSpec& other) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Nodal values of a piecewise-linear function on a GridSpec.
class Field {
 public:
  explicit Field(const GridSpec& grid, double value = 0.0);
  /// Throws InvalidArgument on a length mismatch and NonFiniteValue on NaN/Inf.
  Field(const GridSpec& grid, std::vector<double> values);

  /// Samples fn(x, y) at every node.
  template <class Fn>
  static Field sample(const GridSpec& grid, Fn&& fn) {
    std::vector<double> v(grid.node_count());
    for (int j = 0; j <= grid.n; ++j)
      for (int i = 0; i <= grid.n; ++i) v[grid.index(i, j)] = fn(grid.x(i), grid.y(j));
    return Field(grid, std::move(v));
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  std::size_t size() const noexcept { return values_.size(); }

  bool all_finite() const noexcept;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Throws GridMismatch unless both grids are identical.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context);

}  // namespace mcflow
