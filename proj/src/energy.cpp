#include "mcflow/energy.hpp"

#include <cmath>
#include <vector>

#include "mcflow/discretization.hpp"
#include "mcflow/error.hpp"

namespace mcflow {

void StepParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be positive");
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("time step k must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw InvalidArgument("penalty delta must be nonnegative");
  if (functional == Functional::ScaledRemark && delta >= 1.0)
    throw InvalidArgument("the J-difference functional requires delta < 1");
}

FunctionalWeights functional_weights(const StepParams& p) {
  p.validate();
  switch (p.functional) {
    case Functional::Plain:
      return {1.0, 1.0};
    case Functional::Penalized:
      return {1.0, 1.0 + p.delta};
    case Functional::ScaledRemark:
      return {1.0 - p.delta, 1.0 - p.delta};
  }
  return {1.0, 1.0};
}

namespace {

double potential_integral(const Field& u) {
  return kernels::lumped_integral_of(u.grid(), u.values(),
                                     [](double v) { return double_well(v).F; });
}

double proximal_term(const Field& u, const Field& u_prev, double k) {
  const auto a = u.values();
  const auto b = u_prev.values();
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return kernels::lumped_dot(u.grid(), d, d) / (2.0 * k);
}

}  // namespace

double j_eps(const Field& u, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  return dirichlet_energy(u) + potential_integral(u) / (eps * eps);
}

double step_energy(const Field& u, const Field& u_prev, const StepParams& p) {
  require_same_grid(u.grid(), u_prev.grid(), "step_energy");
  p.validate();
  return j_eps(u, p.eps) + proximal_term(u, u_prev, p.k);
}

double penalized_step_energy(const Field& u, const Field& u_prev, const StepParams& p) {
  const double base = step_energy(u, u_prev, p);
  if (p.delta == 0.0) return base;
  const double e2 = p.eps * p.eps;
  return base + p.delta * (potential_integral(u) / e2 - potential_integral(u_prev) / e2);
}

double scaled_step_energy(const Field& u, const Field& u_prev, const StepParams& p) {
  // The value is defined for every delta >= 0; only the gradient needs delta < 1.
  StepParams value_params = p;
  value_params.functional = Functional::Plain;
  const double base = step_energy(u, u_prev, value_params);
  if (p.delta == 0.0) return base;
  return base + p.delta * (j_eps(u_prev, p.eps) - j_eps(u, p.eps));
}

double functional_value(const Field& u, const Field& u_prev, const StepParams& p) {
  switch (p.functional) {
    case Functional::Plain:
      return step_energy(u, u_prev, p);
    case Functional::Penalized:
      return penalized_step_energy(u, u_prev, p);
    case Functional::ScaledRemark:
      return scaled_step_energy(u, u_prev, p);
  }
  return step_energy(u, u_prev, p);
}

namespace kernels {

void energy_gradient(const GridSpec& grid, std::span<const double> u,
                     std::span<const double> prev, const StepParams& p, std::span<double> out,
                     std::span<double> lap_u) {
  const FunctionalWeights w = functional_weights(p);
  laplacian(grid, u, lap_u);
  const double inv_k = 1.0 / p.k;
  const double wp = w.potential_weight / (p.eps * p.eps);
  const double wg = w.gradient_weight;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = (u[i] - prev[i]) * inv_k - wg * lap_u[i] + wp * double_well(u[i]).f;
}

}  // namespace kernels

Field energy_gradient(const Field& u, const Field& u_prev, const StepParams& p) {
  require_same_grid(u.grid(), u_prev.grid(), "energy_gradient");
  std::vector<double> out(u.size()), lap(u.size());
  kernels::energy_gradient(u.grid(), u.values(), u_prev.values(), p, out, lap);
  return Field(u.grid(), std::move(out));
}

}  // namespace mcflow
