#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcflow/energy.hpp"
#include "mcflow/error.hpp"
#include "mcflow/grid.hpp"

namespace mcflow {

/// Time discretizations of the Allen-Cahn equation.
enum class SchemeId {
  FIS,              ///< backward Euler, f(u^n) implicit
  ConvexSplitting,  ///< (u^n)^3 implicit, -u^{n-1} explicit
  SemiImplicit,     ///< f(u^{n-1}) explicit, one linear solve
  ModifiedCN,       ///< averaged diffusion, difference-quotient potential
};

const char* to_string(SchemeId id) noexcept;

struct NewtonConfig {
  double tol = 1e-8;         ///< lumped norm of the nodal residual
  int max_iter = 50;
  double backtrack = 0.5;    ///< line-search reduction factor
  int max_halvings = 30;

  void validate() const;
};

/// Newton did not converge, or produced a non-finite iterate.
class NewtonError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A time step failed inside an evolution driver.
class StepFailure : public SolverError {
 public:
  StepFailure(const std::string& what, int step, int iterations, double residual)
      : SolverError(what, iterations, residual), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

struct StepStats {
  int newton_iterations = 0;  ///< always 0 for SemiImplicit
  int linear_iterations = 0;
  double residual = 0.0;
};

/// Difference quotient (F(u) - F(v)) / (u - v), with u^3 - u when |u - v| < 1e-12.
double potential_difference_quotient(double u, double v) noexcept;

/// The same quotient in factored form, (u + v)(u^2 + v^2 - 2) / 4, which has
/// no removable singularity and no cancellation.
constexpr double averaged_potential_derivative(double u, double v) noexcept {
  return 0.25 * (u + v) * (u * u + v * v - 2.0);
}

/// Nodal residual of scheme `id` at candidate u^n (lumped-L2 representative).
Field scheme_residual(SchemeId id, const Field& u, const Field& u_prev, const StepParams& p);

/// One time step. p.delta and p.functional are ignored.
///
/// SemiImplicit performs a single linear solve; the others run damped Newton
/// from u_prev with backtracking on the residual norm until the residual is
/// below cfg.tol. Throws NewtonError on failure.
Field step_scheme(SchemeId id, const Field& u_prev, const StepParams& p,
                  const NewtonConfig& cfg = {}, StepStats* stats = nullptr);

struct EvolutionRecord {
  std::vector<double> times;     ///< t_0 = 0, then one entry per step taken
  std::vector<double> energies;  ///< J_eps at each entry of `times`
  std::vector<std::pair<double, Field>> snapshots;
  bool terminated_early = false; ///< field became uniform at +-1
  int steps = 0;
  std::optional<Field> final_state;
};

/// Advances u by one step of size p.k.
using Stepper = std::function<Field(const Field& u_prev, int step)>;
/// Called after every accepted state, including the initial one (step 0).
using StepObserver = std::function<void(int step, double t, const Field& u)>;

/// Generic driver: round(t_end / k) steps, J_eps(., p.eps) recorded at every
/// state, snapshots at the steps nearest to `snapshot_times`. Stops early once
/// the field is within 1e-10 of +1 or -1 everywhere. Step failures are
/// rethrown as StepFailure carrying the step index.
EvolutionRecord evolve(const Stepper& stepper, const Field& u0, const StepParams& p,
                       double t_end, std::span<const double> snapshot_times = {},
                       const StepObserver& observer = {});

EvolutionRecord run_evolution(SchemeId id, const Field& u0, const StepParams& p, double t_end,
                              const NewtonConfig& cfg = {},
                              std::span<const double> snapshot_times = {},
                              const StepObserver& observer = {});

/// True when every value is within tol of +1, or every value within tol of -1.
bool is_uniform_phase(const Field& u, double tol = 1e-10);

}  // namespace mcflow
