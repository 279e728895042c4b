#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcflow/energy.hpp"
#include "mcflow/error.hpp"
#include "mcflow/grid.hpp"

namespace mcflow {

struct MinimizeOptions {
  int max_iter = 200;
  int max_halvings = 40;
  double armijo = 1e-4;
};

struct MinimizeReport {
  int outer_iterations = 0;
  double final_gradient_norm = 0.0;
  /// Functional values after every accepted step, starting with the guess.
  /// Entries after the first are accumulated from per-step decrements that
  /// are evaluated without cancellation, so the sequence is monotone.
  std::vector<double> energy_trace;
  int linear_iterations = 0;
  int steepest_descent_steps = 0;
};

/// Minimization stagnated or ran out of iterations.
class MinimizeError : public SolverError {
 public:
  MinimizeError(const std::string& what, MinimizeReport report)
      : SolverError(what, report.outer_iterations, report.final_gradient_norm),
        report_(std::move(report)) {}
  const MinimizeReport& report() const noexcept { return report_; }

 private:
  MinimizeReport report_;
};

/// Minimizes the step functional `selector` (parameters from p) starting at
/// `guess`, until the lumped norm of its gradient is at most `tol`.
///
/// Newton directions come from truncated CG on the Hessian; CG stops on
/// negative curvature, and the preconditioned gradient is used whenever the
/// result is not a descent direction. Steps are accepted by an Armijo test
/// on the functional value.
std::pair<Field, MinimizeReport> minimize_functional(Functional selector, const Field& guess,
                                                     const Field& u_prev, const StepParams& p,
                                                     double tol,
                                                     const MinimizeOptions& options = {});

/// argmin of the functional selected by p.functional, starting from u_prev.
Field step_minimization(const Field& u_prev, const StepParams& p, double tol,
                        MinimizeReport* report = nullptr);

struct ScheduleLevel {
  double h = 0.0;
  double eps = 0.0;
  friend bool operator==(const ScheduleLevel&, const ScheduleLevel&) = default;
};

/// Coarse-to-fine list of (h, eps) pairs; the last one is the target.
struct MultilevelSchedule {
  std::vector<ScheduleLevel> levels;

  /// Throws InvalidArgument unless the list is nonempty, h strictly
  /// decreases and every eps is positive.
  void validate() const;
  friend bool operator==(const MultilevelSchedule&, const MultilevelSchedule&) = default;
};

/// How multilevel_step treats the per-node convexity condition k <= eps^2.
enum class ConvexStart {
  Unchecked,  ///< run the schedule as given
  Strict,     ///< the coarsest level must satisfy k <= eps^2, else InvalidArgument
  Anchor,     ///< if the coarsest level violates it, prepend a level at
              ///< h = 2 h_0 and eps = sqrt(2 k), which is strictly convex
};

struct MultilevelOptions {
  ConvexStart convex_start = ConvexStart::Anchor;
  MinimizeOptions minimize;
};

struct LevelReport {
  ScheduleLevel level;
  int n = 0;
  bool convex = false;  ///< k <= eps^2 on this level
  MinimizeReport minimize;
};

/// A level of the multilevel schedule failed.
class MultilevelError : public SolverError {
 public:
  MultilevelError(const std::string& what, int level, int iterations, double residual)
      : SolverError(what, iterations, residual), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Schedule actually executed for time step k (Anchor may prepend a level).
MultilevelSchedule effective_schedule(const MultilevelSchedule& schedule, double k,
                                      ConvexStart policy);

/// One time step by coarse-to-fine minimization of the plain step functional.
///
/// Level l minimizes with eps_l on the grid of spacing h_l (same box as
/// u_prev_fine), with u_prev transferred to that grid. The first level starts
/// from `guess` (transferred to its grid); later levels start from the
/// prolongated previous minimizer. The last level must reproduce
/// u_prev_fine's grid and p.eps.
Field multilevel_step(const Field& u_prev_fine, const Field& guess,
                      const MultilevelSchedule& schedule, const StepParams& p, double tol,
                      const MultilevelOptions& options = {},
                      std::vector<LevelReport>* reports = nullptr);

}  // namespace mcflow
