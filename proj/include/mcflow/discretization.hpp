#pragma once

#include <span>
#include <utility>

#include "mcflow/error.hpp"
#include "mcflow/grid.hpp"

namespace mcflow {

struct LinearSolveReport {
  int iterations = 0;
  double final_residual = 0.0;
};

/// CG hit its iteration cap; the report holds the last residual.
class LinearSolveError : public SolverError {
 public:
  LinearSolveError(const std::string& what, LinearSolveReport report)
      : SolverError(what, report.iterations, report.final_residual), report_(report) {}
  const LinearSolveReport& report() const noexcept { return report_; }

 private:
  LinearSolveReport report_;
};

// Span-level kernels shared by the solvers. Every routine assumes the spans
// have grid.node_count() entries.
namespace kernels {

/// out = discrete Laplacian of u (five-point stencil, mirrored ghost nodes).
void laplacian(const GridSpec& grid, std::span<const double> u, std::span<double> out);

/// Mass-lumped L2 inner product (trapezoidal weights times h^2).
double lumped_dot(const GridSpec& grid, std::span<const double> a, std::span<const double> b);
double lumped_norm(const GridSpec& grid, std::span<const double> a);

/// Lumped integral of values[k] over the domain.
double lumped_integral(const GridSpec& grid, std::span<const double> values);

/// Lumped integral of the nodal quantity fn(k), k the node index.
template <class Fn>
double lumped_sum_indexed(const GridSpec& grid, Fn&& fn) {
  const int m = grid.nodes_per_side();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * m;
    double s = 0.5 * (fn(off) + fn(off + m - 1));
    for (int i = 1; i < m - 1; ++i) s += fn(off + i);
    total += (j == 0 || j == m - 1) ? 0.5 * s : s;
  }
  const double h = grid.h();
  return total * h * h;
}

/// Lumped integral of fn(values[k]).
template <class Fn>
double lumped_integral_of(const GridSpec& grid, std::span<const double> values, Fn&& fn) {
  return lumped_sum_indexed(grid, [&](std::size_t k) { return fn(values[k]); });
}

/// Integral of |grad u|^2 / 2 with per-triangle constant gradients.
double dirichlet_energy(const GridSpec& grid, std::span<const double> u);

}  // namespace kernels

/// Discrete Laplacian with homogeneous Neumann closure.
Field apply_neumann_laplacian(const Field& f);

/// Throws GridMismatch for fields on different grids.
double lumped_inner_product(const Field& f, const Field& g);
double lumped_norm(const Field& f);

/// Integral of |grad f|^2 / 2 for the piecewise-linear interpolant of f.
double dirichlet_energy(const Field& f);

/// Solves (alpha I - beta Laplacian) u = rhs by Jacobi-preconditioned CG.
///
/// Converges when the lumped residual norm drops below tol * ||rhs||; throws
/// LinearSolveError after 10 (n + 1) iterations otherwise.
std::pair<Field, LinearSolveReport> solve_screened_poisson(double alpha, double beta,
                                                           const Field& rhs, double tol);

/// Variable-coefficient version: (diag(shift) - beta Laplacian) u = rhs.
/// Every shift entry must be positive. `max_iter` <= 0 selects 10 (n + 1).
std::pair<Field, LinearSolveReport> solve_shifted_laplacian(std::span<const double> shift,
                                                            double beta, const Field& rhs,
                                                            double tol, int max_iter = 0);

/// Bilinear interpolation of `coarse` at the nodes of `fine`.
/// Throws GridMismatch when the boxes differ.
Field prolongate(const Field& coarse, const GridSpec& fine_grid);

/// Nearest-node injection of `fine` onto `coarse_grid` (exact for nested grids).
Field restrict_field(const Field& fine, const GridSpec& coarse_grid);

/// prolongate or restrict_field depending on which grid is finer.
Field transfer(const Field& f, const GridSpec& target);

/// Bilinear evaluation at an arbitrary point, clamped to the box.
double sample_bilinear(const Field& f, double x, double y);

}  // namespace mcflow
