#include "mcflow/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcflow/error.hpp"

namespace mcflow {

LevelSetState ls_step(const LevelSetState& state, double k, double reg) {
  const GridSpec& g = state.omega.grid();
  const double h = g.h();
  if (!(k > 0.0) || k > 0.25 * h * h * (1.0 + 1e-9))
    throw InvalidArgument("level-set step violates k <= h^2/4");
  if (!(reg > 0.0)) throw InvalidArgument("regularization must be positive");
  if (g.n < 2) throw InvalidArgument("level-set grid needs at least two cells per side");

  const int n = g.n;
  const int m = n + 1;
  const auto w = state.omega.values();
  std::vector<double> out(w.size());
  const double inv_2h = 0.5 / h;
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  auto mirror = [n](int i) { return i < 0 ? -i : (i > n ? 2 * n - i : i); };

  for (int j = 0; j < m; ++j) {
    const int jd = mirror(j - 1), ju = mirror(j + 1);
    for (int i = 0; i < m; ++i) {
      const int il = mirror(i - 1), ir = mirror(i + 1);
      auto at = [&](int a, int b) { return w[static_cast<std::size_t>(b) * m + a]; };
      const double c = at(i, j);
      const double wx = (at(ir, j) - at(il, j)) * inv_2h;
      const double wy = (at(i, ju) - at(i, jd)) * inv_2h;
      const double wxx = (at(ir, j) - 2.0 * c + at(il, j)) * inv_h2;
      const double wyy = (at(i, ju) - 2.0 * c + at(i, jd)) * inv_h2;
      const double wxy = (at(ir, ju) - at(ir, jd) - at(il, ju) + at(il, jd)) * inv_4h2;
      const double normal_part =
          (wx * wx * wxx + 2.0 * wx * wy * wxy + wy * wy * wyy) / (wx * wx + wy * wy + reg);
      out[static_cast<std::size_t>(j) * m + i] = c + k * (wxx + wyy - normal_part);
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw NonFiniteValue("level-set update produced NaN or Inf");
  return {Field(g, std::move(out)), state.time + k};
}

double default_regularization(const Field& omega0) {
  const auto v = omega0.values();
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  return std::max(1e-10 * peak * peak, 1e-300);
}

bool zero_set_empty(const Field& omega) {
  const auto v = omega.values();
  const bool any_inside = std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  const bool all_inside = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  return !any_inside || all_inside;
}

LevelSetRun ls_run(const Field& omega0, double k, double t_end,
                   std::span<const double> snapshot_times, const LevelSetObserver& observer) {
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  const double reg = default_regularization(omega0);
  const int n_steps = std::max(1, static_cast<int>(std::lround(t_end / k)));
  std::vector<int> snapshot_steps;
  for (double t : snapshot_times) {
    const long s = std::lround(t / k);
    if (t < 0.0 || s > n_steps) throw InvalidArgument("snapshot time outside [0, t_end]");
    snapshot_steps.push_back(static_cast<int>(s));
  }

  LevelSetRun run{{}, LevelSetState{omega0, 0.0}, false, 0};
  auto visit = [&](int step) {
    if (std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end())
      run.snapshots.push_back(run.final_state);
    if (observer) observer(step, run.final_state);
  };
  visit(0);
  if (zero_set_empty(omega0)) {
    run.vanished = true;
    return run;
  }
  for (int step = 1; step <= n_steps; ++step) {
    run.final_state = ls_step(run.final_state, k, reg);
    run.final_state.time = step * k;
    run.steps = step;
    visit(step);
    if (zero_set_empty(run.final_state.omega)) {
      run.vanished = true;
      break;
    }
  }
  return run;
}

}  // namespace mcflow
