#include "mcflow/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mcflow/detail/cg.hpp"
#include "mcflow/discretization.hpp"

namespace mcflow {

const char* to_string(SchemeId id) noexcept {
  switch (id) {
    case SchemeId::FIS:
      return "fis";
    case SchemeId::ConvexSplitting:
      return "css";
    case SchemeId::SemiImplicit:
      return "semi";
    case SchemeId::ModifiedCN:
      return "mcn";
  }
  return "?";
}

void NewtonConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  if (max_iter < 1) throw InvalidArgument("Newton needs at least one iteration");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw InvalidArgument("backtracking factor must lie in (0, 1)");
  if (max_halvings < 0) throw InvalidArgument("max_halvings must be nonnegative");
}

double potential_difference_quotient(double u, double v) noexcept {
  if (std::abs(u - v) < 1e-12) return double_well(u).f;
  return (double_well(u).F - double_well(v).F) / (u - v);
}

namespace {

// Residual and Jacobian pieces of one scheme; everything else is shared.
struct SchemeKernel {
  SchemeId id;
  const GridSpec& grid;
  std::span<const double> prev;
  double inv_k;
  double inv_e2;
  std::vector<double> lap_prev;  // only for ModifiedCN

  SchemeKernel(SchemeId id_, const GridSpec& g, std::span<const double> p, const StepParams& sp)
      : id(id_), grid(g), prev(p), inv_k(1.0 / sp.k), inv_e2(1.0 / (sp.eps * sp.eps)) {
    if (id == SchemeId::ModifiedCN) {
      lap_prev.resize(p.size());
      kernels::laplacian(grid, p, lap_prev);
    }
  }

  double laplacian_weight() const { return id == SchemeId::ModifiedCN ? 0.5 : 1.0; }

  void residual(std::span<const double> u, std::span<double> out, std::span<double> lap) const {
    kernels::laplacian(grid, u, lap);
    const std::size_t n = u.size();
    switch (id) {
      case SchemeId::FIS:
        for (std::size_t i = 0; i < n; ++i)
          out[i] = (u[i] - prev[i]) * inv_k - lap[i] + inv_e2 * double_well(u[i]).f;
        break;
      case SchemeId::ConvexSplitting:
        for (std::size_t i = 0; i < n; ++i)
          out[i] = (u[i] - prev[i]) * inv_k - lap[i] + inv_e2 * (u[i] * u[i] * u[i] - prev[i]);
        break;
      case SchemeId::SemiImplicit:
        for (std::size_t i = 0; i < n; ++i)
          out[i] = (u[i] - prev[i]) * inv_k - lap[i] + inv_e2 * double_well(prev[i]).f;
        break;
      case SchemeId::ModifiedCN:
        for (std::size_t i = 0; i < n; ++i)
          out[i] = (u[i] - prev[i]) * inv_k - 0.5 * (lap[i] + lap_prev[i]) +
                   inv_e2 * averaged_potential_derivative(u[i], prev[i]);
        break;
    }
  }

  // Diagonal part of the Jacobian (the Laplacian part is -laplacian_weight() * Lap).
  void jacobian_diagonal(std::span<const double> u, std::span<double> diag) const {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      switch (id) {
        case SchemeId::FIS:
          c = double_well_curvature(u[i]);
          break;
        case SchemeId::ConvexSplitting:
          c = 3.0 * u[i] * u[i];
          break;
        case SchemeId::SemiImplicit:
          c = 0.0;
          break;
        case SchemeId::ModifiedCN: {
          const double v = prev[i];
          c = 0.25 * (u[i] * u[i] + v * v - 2.0) + 0.5 * u[i] * (u[i] + v);
          break;
        }
      }
      diag[i] = inv_k + inv_e2 * c;
    }
  }
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Solves (diag - beta Lap) d = rhs. Shifts the diagonal when CG meets
// negative curvature so the system becomes positive definite.
int newton_direction(const GridSpec& grid, std::vector<double>& diag, double beta, double inv_k,
                     std::span<const double> rhs, std::span<double> d, double abs_tol) {
  const double h = grid.h();
  const double stencil = 4.0 * beta / (h * h);
  std::vector<double> lap(rhs.size());
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    kernels::laplacian(grid, in, lap);
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = diag[k] * in[k] - beta * lap[k];
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] / (std::abs(diag[k]) + stencil);
  };
  const int cap = 10 * (grid.n + 1);
  std::fill(d.begin(), d.end(), 0.0);
  auto cg = detail::conjugate_gradient(grid, apply, precondition, rhs, d, abs_tol, cap);
  int iterations = cg.iterations;
  if (cg.status == detail::CgStatus::NegativeCurvature) {
    // Levenberg shift: enough to make every diagonal entry positive.
    const double lowest = *std::min_element(diag.begin(), diag.end());
    const double shift = std::max(0.0, -lowest) + 1e-8 * inv_k;
    for (double& a : diag) a += shift;
    std::fill(d.begin(), d.end(), 0.0);
    cg = detail::conjugate_gradient(grid, apply, precondition, rhs, d, abs_tol, cap);
    iterations += cg.iterations;
  }
  return iterations;
}

}  // namespace

Field scheme_residual(SchemeId id, const Field& u, const Field& u_prev, const StepParams& p) {
  require_same_grid(u.grid(), u_prev.grid(), "scheme_residual");
  p.validate();
  SchemeKernel kernel(id, u.grid(), u_prev.values(), p);
  std::vector<double> out(u.size()), lap(u.size());
  kernel.residual(u.values(), out, lap);
  return Field(u.grid(), std::move(out));
}

Field step_scheme(SchemeId id, const Field& u_prev, const StepParams& params,
                  const NewtonConfig& cfg, StepStats* stats) {
  StepParams p = params;
  p.delta = 0.0;
  p.functional = Functional::Plain;
  p.validate();
  cfg.validate();
  const GridSpec& grid = u_prev.grid();
  const std::size_t n = u_prev.size();
  SchemeKernel kernel(id, grid, u_prev.values(), p);
  const double beta = kernel.laplacian_weight();

  std::vector<double> u(u_prev.values().begin(), u_prev.values().end());
  std::vector<double> r(n), lap(n), diag(n), d(n), trial(n), r_trial(n);
  StepStats local;

  kernel.residual(u, r, lap);
  double rn = kernels::lumped_norm(grid, r);
  const double rn0 = rn;
  for (int it = 0;; ++it) {
    if (!std::isfinite(rn)) throw NewtonError("non-finite residual in Newton iteration", it, rn);
    if (rn <= cfg.tol) break;
    if (it == cfg.max_iter)
      throw NewtonError(std::string("Newton did not converge for scheme ") + to_string(id), it,
                        rn);

    kernel.jacobian_diagonal(u, diag);
    for (std::size_t i = 0; i < n; ++i) r_trial[i] = -r[i];
    // Linear schemes get an exact solve; otherwise an inexact Newton forcing term.
    const double forcing = id == SchemeId::SemiImplicit ? 0.0 : std::min(0.1, rn / rn0);
    const double abs_tol = std::max(forcing * rn, 0.1 * cfg.tol);
    local.linear_iterations += newton_direction(grid, diag, beta, kernel.inv_k, r_trial, d, abs_tol);

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * d[i];
      kernel.residual(trial, r_trial, lap);
      const double rt = kernels::lumped_norm(grid, r_trial);
      if (std::isfinite(rt) && rt <= (1.0 - 1e-4 * alpha) * rn) {
        u.swap(trial);
        r.swap(r_trial);
        rn = rt;
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    local.newton_iterations = it + 1;
    if (!accepted) throw NewtonError("Newton line search found no decrease", it + 1, rn);
    if (!all_finite(u)) throw NewtonError("non-finite Newton iterate", it + 1, rn);
  }
  local.residual = rn;
  // The semi-implicit system is linear: its single pass is a plain solve.
  if (id == SchemeId::SemiImplicit) local.newton_iterations = 0;
  if (stats) *stats = local;
  return Field(grid, std::move(u));
}

bool is_uniform_phase(const Field& u, double tol) {
  const auto v = u.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - 1.0 <= tol && 1.0 - *lo <= tol) || (*hi + 1.0 <= tol && -1.0 - *lo <= tol);
}

EvolutionRecord evolve(const Stepper& stepper, const Field& u0, const StepParams& p,
                       double t_end, std::span<const double> snapshot_times,
                       const StepObserver& observer) {
  p.validate();
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  const int n_steps = std::max(1, static_cast<int>(std::lround(t_end / p.k)));

  std::vector<int> snapshot_steps;
  for (double t : snapshot_times) {
    const long s = std::lround(t / p.k);
    if (t < 0.0 || s > n_steps) throw InvalidArgument("snapshot time outside [0, t_end]");
    snapshot_steps.push_back(static_cast<int>(s));
  }
  auto wants_snapshot = [&](int step) {
    return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end();
  };

  EvolutionRecord rec;
  Field u = u0;
  auto record = [&](int step, const Field& state) {
    const double t = step * p.k;
    rec.times.push_back(t);
    rec.energies.push_back(j_eps(state, p.eps));
    if (wants_snapshot(step)) rec.snapshots.emplace_back(t, state);
    if (observer) observer(step, t, state);
  };

  record(0, u);
  if (is_uniform_phase(u)) {
    rec.terminated_early = true;
    rec.final_state = u;
    return rec;
  }
  for (int step = 1; step <= n_steps; ++step) {
    try {
      u = stepper(u, step);
    } catch (const SolverError& e) {
      throw StepFailure("step " + std::to_string(step) + ": " + e.what(), step, e.iterations(),
                        e.residual());
    } catch (const NonFiniteValue& e) {
      throw StepFailure("step " + std::to_string(step) + ": " + e.what(), step, 0,
                        std::numeric_limits<double>::quiet_NaN());
    }
    rec.steps = step;
    record(step, u);
    if (is_uniform_phase(u)) {
      rec.terminated_early = step < n_steps;
      break;
    }
  }
  rec.final_state = u;
  return rec;
}

EvolutionRecord run_evolution(SchemeId id, const Field& u0, const StepParams& p, double t_end,
                              const NewtonConfig& cfg, std::span<const double> snapshot_times,
                              const StepObserver& observer) {
  auto stepper = [&](const Field& prev, int) { return step_scheme(id, prev, p, cfg); };
  return evolve(stepper, u0, p, t_end, snapshot_times, observer);
}

}  // namespace mcflow
