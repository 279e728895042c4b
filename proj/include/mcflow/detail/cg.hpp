#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mcflow/discretization.hpp"

namespace mcflow::detail {

enum class CgStatus { Converged, NegativeCurvature, MaxIterations };

struct CgResult {
  CgStatus status = CgStatus::MaxIterations;
  int iterations = 0;
  double residual = 0.0;
};

// Preconditioned CG in the lumped inner product. `apply(in, out)` must be
// self-adjoint in that inner product and `precondition(in, out)` positive.
// Stops on ||r|| <= abs_tol, on p.Ap <= 0 (x holds the last iterate, zero if
// that happened on the first direction) or after max_iter iterations.
template <class Apply, class Precondition>
CgResult conjugate_gradient(const GridSpec& grid, Apply&& apply, Precondition&& precondition,
                            std::span<const double> b, std::span<double> x, double abs_tol,
                            int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n);

  apply(std::span<const double>(x), std::span<double>(ap));
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];

  CgResult result;
  result.residual = kernels::lumped_norm(grid, r);
  if (result.residual <= abs_tol) {
    result.status = CgStatus::Converged;
    return result;
  }
  precondition(std::span<const double>(r), std::span<double>(z));
  p = z;
  double rz = kernels::lumped_dot(grid, r, z);

  for (int it = 0; it < max_iter; ++it) {
    apply(std::span<const double>(p), std::span<double>(ap));
    const double pap = kernels::lumped_dot(grid, p, ap);
    if (!(pap > 0.0)) {
      result.status = CgStatus::NegativeCurvature;
      result.iterations = it;
      return result;
    }
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    result.iterations = it + 1;
    result.residual = kernels::lumped_norm(grid, r);
    if (result.residual <= abs_tol) {
      result.status = CgStatus::Converged;
      return result;
    }
    precondition(std::span<const double>(r), std::span<double>(z));
    const double rz_next = kernels::lumped_dot(grid, r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  result.status = CgStatus::MaxIterations;
  return result;
}

}  // namespace mcflow::detail
