#include "mcflow/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mcflow/detail/cg.hpp"
#include "mcflow/discretization.hpp"

namespace mcflow {

std::pair<Field, MinimizeReport> minimize_functional(Functional selector, const Field& guess,
                                                     const Field& u_prev, const StepParams& params,
                                                     double tol,
                                                     const MinimizeOptions& options) {
  require_same_grid(guess.grid(), u_prev.grid(), "minimize_functional");
  if (!(tol > 0.0)) throw InvalidArgument("minimization tolerance must be positive");
  StepParams p = params;
  p.functional = selector;
  const FunctionalWeights w = functional_weights(p);

  const GridSpec& grid = guess.grid();
  const std::size_t n = guess.size();
  const auto prev = u_prev.values();
  const double h = grid.h();
  const double inv_k = 1.0 / p.k;
  const double wp = w.potential_weight / (p.eps * p.eps);
  const double wg = w.gradient_weight;
  const double stencil = 4.0 * wg / (h * h);

  std::vector<double> u(guess.values().begin(), guess.values().end());
  std::vector<double> g(n), lap_u(n), lap_d(n), diag(n), d(n), scratch(n);

  MinimizeReport report;
  report.energy_trace.push_back(functional_value(guess, u_prev, p));
  kernels::energy_gradient(grid, u, prev, p, g, lap_u);
  double gn = kernels::lumped_norm(grid, g);
  const double gn0 = std::max(gn, 1e-300);

  auto hessian = [&](std::span<const double> in, std::span<double> out) {
    kernels::laplacian(grid, in, scratch);
    for (std::size_t i = 0; i < n; ++i) out[i] = diag[i] * in[i] - wg * scratch[i];
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / (std::abs(diag[i]) + stencil);
  };

  for (int it = 0;; ++it) {
    report.outer_iterations = it;
    report.final_gradient_norm = gn;
    if (!std::isfinite(gn)) throw MinimizeError("non-finite gradient", report);
    if (gn <= tol) break;
    if (it == options.max_iter) throw MinimizeError("minimization hit its iteration cap", report);

    for (std::size_t i = 0; i < n; ++i) diag[i] = inv_k + wp * double_well_curvature(u[i]);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
    const double forcing = std::min(0.5, std::sqrt(gn / gn0));
    const double abs_tol = std::max(forcing * gn, 0.1 * tol);
    std::fill(d.begin(), d.end(), 0.0);
    const auto cg = detail::conjugate_gradient(grid, hessian, precondition,
                                               std::span<const double>(rhs), d, abs_tol,
                                               10 * (grid.n + 1));
    report.linear_iterations += cg.iterations;

    double slope = kernels::lumped_dot(grid, g, d);
    if (cg.iterations == 0 || !(slope < 0.0)) {
      precondition(rhs, d);
      slope = kernels::lumped_dot(grid, g, d);
      ++report.steepest_descent_steps;
    }

    kernels::laplacian(grid, d, lap_d);
    // Exact increments of each term along u + alpha d.
    const double grad_lin = -kernels::lumped_dot(grid, lap_u, d);
    const double grad_quad = -kernels::lumped_dot(grid, lap_d, d);
    const double prox_lin = kernels::lumped_sum_indexed(
        grid, [&](std::size_t i) { return (u[i] - prev[i]) * d[i]; });
    const double prox_quad = kernels::lumped_dot(grid, d, d);
    auto decrement = [&](double alpha) {
      const double pot = kernels::lumped_sum_indexed(
          grid, [&](std::size_t i) { return double_well_increment(u[i], alpha * d[i]); });
      return wg * (alpha * grad_lin + 0.5 * alpha * alpha * grad_quad) + wp * pot +
             (alpha * prox_lin + 0.5 * alpha * alpha * prox_quad) * inv_k;
    };

    double alpha = 1.0;
    double change = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      change = decrement(alpha);
      if (std::isfinite(change) && change <= options.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw MinimizeError("line search found no descent step", report);

    for (std::size_t i = 0; i < n; ++i) u[i] += alpha * d[i];
    report.energy_trace.push_back(report.energy_trace.back() + change);
    kernels::energy_gradient(grid, u, prev, p, g, lap_u);
    gn = kernels::lumped_norm(grid, g);
  }
  return {Field(grid, std::move(u)), std::move(report)};
}

Field step_minimization(const Field& u_prev, const StepParams& p, double tol,
                        MinimizeReport* report) {
  auto [u, rep] = minimize_functional(p.functional, u_prev, u_prev, p, tol);
  if (report) *report = std::move(rep);
  return u;
}

void MultilevelSchedule::validate() const {
  if (levels.empty()) throw InvalidArgument("multilevel schedule has no levels");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (!(levels[l].h > 0.0)) throw InvalidArgument("schedule spacing must be positive");
    if (!(levels[l].eps > 0.0)) throw InvalidArgument("schedule eps must be positive");
    if (l > 0 && !(levels[l].h < levels[l - 1].h))
      throw InvalidArgument("schedule spacings must strictly decrease");
  }
}

MultilevelSchedule effective_schedule(const MultilevelSchedule& schedule, double k,
                                      ConvexStart policy) {
  schedule.validate();
  const ScheduleLevel& first = schedule.levels.front();
  const bool convex = k <= first.eps * first.eps;
  if (convex || policy == ConvexStart::Unchecked) return schedule;
  if (policy == ConvexStart::Strict)
    throw InvalidArgument("coarsest level violates k <= eps^2");
  MultilevelSchedule out;
  out.levels.push_back({2.0 * first.h, std::sqrt(2.0 * k)});
  out.levels.insert(out.levels.end(), schedule.levels.begin(), schedule.levels.end());
  return out;
}

Field multilevel_step(const Field& u_prev_fine, const Field& guess,
                      const MultilevelSchedule& schedule, const StepParams& p, double tol,
                      const MultilevelOptions& options, std::vector<LevelReport>* reports) {
  p.validate();
  const MultilevelSchedule plan = effective_schedule(schedule, p.k, options.convex_start);
  const GridSpec& target = u_prev_fine.grid();
  const ScheduleLevel& last = plan.levels.back();
  if (!(GridSpec::with_spacing(target, last.h) == target))
    throw InvalidArgument("last schedule level does not match the target grid");
  if (std::abs(last.eps - p.eps) > 1e-12 * p.eps)
    throw InvalidArgument("last schedule level does not match the target eps");

  if (reports) reports->clear();
  Field current = guess;
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    const ScheduleLevel& level = plan.levels[l];
    const GridSpec grid = GridSpec::with_spacing(target, level.h);
    const Field prev = transfer(u_prev_fine, grid);
    const Field start = transfer(current, grid);
    StepParams lp = p;
    lp.eps = level.eps;
    lp.delta = 0.0;
    lp.functional = Functional::Plain;
    try {
      auto [u, rep] = minimize_functional(Functional::Plain, start, prev, lp, tol, options.minimize);
      if (reports) reports->push_back({level, grid.n, p.k <= level.eps * level.eps, rep});
      current = std::move(u);
    } catch (const SolverError& e) {
      throw MultilevelError("level " + std::to_string(l) + " (h=" + std::to_string(level.h) +
                                ", eps=" + std::to_string(level.eps) + "): " + e.what(),
                            static_cast<int>(l), e.iterations(), e.residual());
    }
  }
  return current;
}

}  // namespace mcflow
