#include "mcflow/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "mcflow/detail/cg.hpp"

namespace mcflow {
namespace kernels {

void laplacian(const GridSpec& grid, std::span<const double> u, std::span<double> out) {
  const int n = grid.n;
  const int m = n + 1;
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  if (n == 1) {
    // Mirror ghosts coincide with the opposite node on a single cell.
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const double c = u[grid.index(i, j)];
        out[grid.index(i, j)] =
            (2.0 * u[grid.index(1 - i, j)] + 2.0 * u[grid.index(i, 1 - j)] - 4.0 * c) * inv_h2;
      }
    return;
  }
  for (int j = 0; j < m; ++j) {
    const int jd = j > 0 ? j - 1 : 1;
    const int ju = j < n ? j + 1 : n - 1;
    const double* row = u.data() + static_cast<std::size_t>(j) * m;
    const double* down = u.data() + static_cast<std::size_t>(jd) * m;
    const double* up = u.data() + static_cast<std::size_t>(ju) * m;
    double* o = out.data() + static_cast<std::size_t>(j) * m;
    o[0] = (2.0 * row[1] + down[0] + up[0] - 4.0 * row[0]) * inv_h2;
    for (int i = 1; i < n; ++i)
      o[i] = (row[i - 1] + row[i + 1] + down[i] + up[i] - 4.0 * row[i]) * inv_h2;
    o[n] = (2.0 * row[n - 1] + down[n] + up[n] - 4.0 * row[n]) * inv_h2;
  }
}

double lumped_dot(const GridSpec& grid, std::span<const double> a, std::span<const double> b) {
  const int m = grid.nodes_per_side();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * m;
    const double* ra = a.data() + off;
    const double* rb = b.data() + off;
    double s = 0.0;
    for (int i = 1; i < m - 1; ++i) s += ra[i] * rb[i];
    s += 0.5 * (ra[0] * rb[0] + ra[m - 1] * rb[m - 1]);
    total += (j == 0 || j == m - 1) ? 0.5 * s : s;
  }
  const double h = grid.h();
  return total * h * h;
}

double lumped_norm(const GridSpec& grid, std::span<const double> a) {
  return std::sqrt(std::max(0.0, lumped_dot(grid, a, a)));
}

double lumped_integral(const GridSpec& grid, std::span<const double> values) {
  return lumped_integral_of(grid, values, [](double v) { return v; });
}

double dirichlet_energy(const GridSpec& grid, std::span<const double> u) {
  // Each cell is split into two triangles; summing their constant-gradient
  // energies leaves a quarter of the four squared edge differences per cell.
  const int n = grid.n;
  const int m = n + 1;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double* lo = u.data() + static_cast<std::size_t>(j) * m;
    const double* hi = lo + m;
    for (int i = 0; i < n; ++i) {
      const double a = lo[i + 1] - lo[i];
      const double b = hi[i + 1] - hi[i];
      const double c = hi[i] - lo[i];
      const double d = hi[i + 1] - lo[i + 1];
      total += a * a + b * b + c * c + d * d;
    }
  }
  return 0.25 * total;
}

}  // namespace kernels

Field apply_neumann_laplacian(const Field& f) {
  std::vector<double> out(f.size());
  kernels::laplacian(f.grid(), f.values(), out);
  return Field(f.grid(), std::move(out));
}

double lumped_inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "lumped_inner_product");
  return kernels::lumped_dot(f.grid(), f.values(), g.values());
}

double lumped_norm(const Field& f) { return kernels::lumped_norm(f.grid(), f.values()); }

double dirichlet_energy(const Field& f) { return kernels::dirichlet_energy(f.grid(), f.values()); }

std::pair<Field, LinearSolveReport> solve_shifted_laplacian(std::span<const double> shift,
                                                            double beta, const Field& rhs,
                                                            double tol, int max_iter) {
  const GridSpec& grid = rhs.grid();
  if (shift.size() != rhs.size()) throw InvalidArgument("shift length does not match grid");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  for (double s : shift)
    if (!(s > 0.0)) throw InvalidArgument("shift must be positive everywhere");
  if (max_iter <= 0) max_iter = 10 * (grid.n + 1);

  const double h = grid.h();
  const double stencil_diag = 4.0 * beta / (h * h);
  std::vector<double> lap(rhs.size());
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    kernels::laplacian(grid, in, lap);
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = shift[k] * in[k] - beta * lap[k];
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] / (shift[k] + stencil_diag);
  };

  std::vector<double> x(rhs.size(), 0.0);
  const double target = tol * kernels::lumped_norm(grid, rhs.values());
  const auto cg = detail::conjugate_gradient(grid, apply, precondition, rhs.values(), x, target,
                                             max_iter);
  LinearSolveReport report{cg.iterations, cg.residual};
  if (cg.status != detail::CgStatus::Converged)
    throw LinearSolveError("conjugate gradient did not reach the requested tolerance", report);
  return {Field(grid, std::move(x)), report};
}

std::pair<Field, LinearSolveReport> solve_screened_poisson(double alpha, double beta,
                                                           const Field& rhs, double tol) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  const std::vector<double> shift(rhs.size(), alpha);
  return solve_shifted_laplacian(shift, beta, rhs, tol);
}

namespace {

// Cell index and local coordinate of x along one axis of `grid`.
std::pair<int, double> locate(double x, double origin, double h, int n) {
  double s = (x - origin) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n));
  int i = std::min(static_cast<int>(std::floor(s)), n - 1);
  return {i, s - i};
}

}  // namespace

double sample_bilinear(const Field& f, double x, double y) {
  const GridSpec& g = f.grid();
  const auto [i, tx] = locate(x, g.x_min, g.h(), g.n);
  const auto [j, ty] = locate(y, g.y_min, g.h(), g.n);
  const double v00 = f(i, j), v10 = f(i + 1, j), v01 = f(i, j + 1), v11 = f(i + 1, j + 1);
  return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

Field prolongate(const Field& coarse, const GridSpec& fine_grid) {
  fine_grid.validate();
  if (!coarse.grid().same_box(fine_grid))
    throw GridMismatch("prolongate: coarse and fine grids cover different boxes");
  const GridSpec& cg = coarse.grid();
  const double hc = cg.h();
  const int m = fine_grid.nodes_per_side();
  std::vector<int> ci(m), cj(m);
  std::vector<double> tx(m), ty(m);
  for (int i = 0; i < m; ++i) {
    std::tie(ci[i], tx[i]) = locate(fine_grid.x(i), cg.x_min, hc, cg.n);
    std::tie(cj[i], ty[i]) = locate(fine_grid.y(i), cg.y_min, hc, cg.n);
  }
  std::vector<double> out(fine_grid.node_count());
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int a = ci[i], b = cj[j];
      const double v00 = coarse(a, b), v10 = coarse(a + 1, b);
      const double v01 = coarse(a, b + 1), v11 = coarse(a + 1, b + 1);
      out[fine_grid.index(i, j)] = (1.0 - ty[j]) * ((1.0 - tx[i]) * v00 + tx[i] * v10) +
                                   ty[j] * ((1.0 - tx[i]) * v01 + tx[i] * v11);
    }
  return Field(fine_grid, std::move(out));
}

Field restrict_field(const Field& fine, const GridSpec& coarse_grid) {
  coarse_grid.validate();
  if (!fine.grid().same_box(coarse_grid))
    throw GridMismatch("restrict_field: grids cover different boxes");
  const GridSpec& fg = fine.grid();
  const int m = coarse_grid.nodes_per_side();
  std::vector<int> fi(m), fj(m);
  for (int i = 0; i < m; ++i) {
    fi[i] = std::clamp(static_cast<int>(std::lround((coarse_grid.x(i) - fg.x_min) / fg.h())), 0,
                       fg.n);
    fj[i] = std::clamp(static_cast<int>(std::lround((coarse_grid.y(i) - fg.y_min) / fg.h())), 0,
                       fg.n);
  }
  std::vector<double> out(coarse_grid.node_count());
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) out[coarse_grid.index(i, j)] = fine(fi[i], fj[j]);
  return Field(coarse_grid, std::move(out));
}

Field transfer(const Field& f, const GridSpec& target) {
  if (f.grid() == target) return f;
  return target.n >= f.grid().n ? prolongate(f, target) : restrict_field(f, target);
}

}  // namespace mcflow
