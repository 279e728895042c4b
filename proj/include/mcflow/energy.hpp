#pragma once

#include <span>

#include "mcflow/grid.hpp"

namespace mcflow {

/// Which step functional a minimization (or gradient) refers to.
///
///  - Plain:        E(u) = J(u) + |u - u_prev|^2 / (2k)
///  - Penalized:    E(u) + delta / eps^2 * (int F(u) - int F(u_prev))
///  - ScaledRemark: E(u) + delta * (J(u_prev) - J(u)),  delta < 1
enum class Functional { Plain, Penalized, ScaledRemark };

/// Parameters of one time step.
struct StepParams {
  double eps = 0.01;  ///< interaction length
  double k = 1e-4;    ///< time step
  double delta = 0.0; ///< penalty constant
  Functional functional = Functional::Plain;

  /// Throws InvalidArgument on eps <= 0, k <= 0, delta < 0, or a
  /// ScaledRemark step with delta >= 1.
  void validate() const;
};

struct DoubleWell {
  double F;  ///< (u^2 - 1)^2 / 4
  double f;  ///< u^3 - u
};

constexpr DoubleWell double_well(double u) noexcept {
  const double s = u * u - 1.0;
  return {0.25 * s * s, u * s};
}

constexpr double double_well_curvature(double u) noexcept { return 3.0 * u * u - 1.0; }

/// F(u + s) - F(u), evaluated without cancellation for small s.
constexpr double double_well_increment(double u, double s) noexcept {
  const double v = u + s;
  return 0.25 * s * (u + v) * (u * u + v * v - 2.0);
}

/// Free energy: int |grad u|^2 / 2 + F(u) / eps^2.
double j_eps(const Field& u, double eps);

/// J(u) + int (u - u_prev)^2 / (2k).
double step_energy(const Field& u, const Field& u_prev, const StepParams& p);

/// step_energy plus delta / eps^2 * (int F(u) - int F(u_prev)).
double penalized_step_energy(const Field& u, const Field& u_prev, const StepParams& p);

/// step_energy plus delta * (J(u_prev) - J(u)). Defined for any delta >= 0;
/// the delta < 1 restriction applies to gradients and minimization only.
double scaled_step_energy(const Field& u, const Field& u_prev, const StepParams& p);

/// Dispatches on p.functional.
double functional_value(const Field& u, const Field& u_prev, const StepParams& p);

/// Lumped-L2 gradient of the functional selected by p.functional.
Field energy_gradient(const Field& u, const Field& u_prev, const StepParams& p);

/// Every supported functional has the form
///   gradient_weight * G(u) + potential_weight / eps^2 * int F(u)
///     + int (u - u_prev)^2 / (2k) + constant(u_prev)
/// with G the Dirichlet energy.
struct FunctionalWeights {
  double gradient_weight = 1.0;
  double potential_weight = 1.0;
};

FunctionalWeights functional_weights(const StepParams& p);

namespace kernels {

/// out = (u - prev)/k - w_G * Lap u + w_P f(u) / eps^2. `lap_u` receives Lap u.
void energy_gradient(const GridSpec& grid, std::span<const double> u,
                     std::span<const double> prev, const StepParams& p, std::span<double> out,
                     std::span<double> lap_u);

}  // namespace kernels

}  // namespace mcflow
