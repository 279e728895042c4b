#include "mcflow/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <cstdio>

#include "json.hpp"

#include "mcflow/discretization.hpp"
#include "mcflow/energy.hpp"
#include "mcflow/levelset.hpp"
#include "mcflow/minimize.hpp"
#include "mcflow/schemes.hpp"

namespace mcflow {

namespace {

using json = nlohmann::ordered_json;

std::vector<int> snapshot_steps(const RunConfig& c) {
  std::vector<int> out;
  for (double t : c.snapshot_times) out.push_back(static_cast<int>(std::lround(t / c.k)));
  return out;
}

Field complement(const Field& u) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x = 1.0 - x;
  return Field(u.grid(), std::move(v));
}

const char* guess_name(GuessPolicy g) {
  return g == GuessPolicy::Previous ? "previous" : "complement";
}

class Recorder {
 public:
  Recorder(RunResult& r, bool energy) : r_(r), energy_(energy), snaps_(snapshot_steps(r.config)) {}

  void operator()(int step, double t, const Field& u) {
    r_.steps.push_back(step);
    r_.times.push_back(t);
    if (energy_) r_.energies.push_back(j_eps(u, r_.config.eps));
    tracker_.observe(t, u);
    r_.component_counts.push_back(tracker_.timeline().component_counts.back());
    if (r_.config.record_radius && radius_alive_) {
      try {
        r_.radii.emplace_back(t, measure_radius(u));
      } catch (const VanishedInterface&) {
        radius_alive_ = false;
      }
    }
    if (std::find(snaps_.begin(), snaps_.end(), step) != snaps_.end()) r_.snapshots.emplace_back(t, u);
    r_.final_time = t;
  }

  void finish() {
    r_.topology = tracker_.timeline();
  }

 private:
  RunResult& r_;
  bool energy_;
  std::vector<int> snaps_;
  TopologyTracker tracker_;
  bool radius_alive_ = true;
};

std::string module_of(MethodKind m) {
  switch (m) {
    case MethodKind::LevelSet:
      return "levelset";
    case MethodKind::Scheme:
      return "schemes";
    case MethodKind::Minimize:
      return "minimize";
    case MethodKind::Multilevel:
      return "multilevel";
  }
  return "?";
}

void progress(bool quiet, const RunConfig& c, int step, int n_steps) {
  if (quiet || n_steps < 10) return;
  if (step % std::max(1, n_steps / 10) == 0)
    std::cerr << c.name << ": step " << step << "/" << n_steps << "\n";
}

}  // namespace

RunResult execute(const RunConfig& config, bool quiet) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  RunResult r;
  r.config = config;
  const int n_steps = std::max(1, static_cast<int>(std::lround(config.t_end / config.k)));

  Field u0 = make_initial_condition(config.ic, config.grid);
  Recorder rec(r, config.method != MethodKind::LevelSet);
  try {
    if (config.method == MethodKind::LevelSet) {
      auto observer = [&](int step, const LevelSetState& s) {
        rec(step, s.time, s.omega);
        progress(quiet, config, step, n_steps);
      };
      LevelSetRun run = ls_run(u0, config.k, config.t_end, {}, observer);
      r.final_state = run.final_state.omega;
    } else {
      const StepParams p = config.step_params();
      Stepper stepper;
      if (config.method == MethodKind::Scheme) {
        NewtonConfig nc;
        nc.tol = config.tol;
        stepper = [&, nc](const Field& prev, int) {
          StepStats st;
          Field next = step_scheme(config.scheme, prev, p, nc, &st);
          r.totals.newton_iterations += st.newton_iterations;
          r.totals.linear_iterations += st.linear_iterations;
          r.totals.max_final_residual = std::max(r.totals.max_final_residual, st.residual);
          return next;
        };
      } else if (config.method == MethodKind::Minimize) {
        stepper = [&](const Field& prev, int) {
          const Field guess = config.guess == GuessPolicy::Previous ? prev : complement(prev);
          auto [next, rep] = minimize_functional(p.functional, guess, prev, p, config.tol);
          r.totals.minimize_iterations += rep.outer_iterations;
          r.totals.linear_iterations += rep.linear_iterations;
          r.totals.steepest_descent_steps += rep.steepest_descent_steps;
          r.totals.max_final_residual = std::max(r.totals.max_final_residual, rep.final_gradient_norm);
          return next;
        };
      } else {
        MultilevelOptions opts;
        opts.convex_start = config.convex_start;
        stepper = [&, opts](const Field& prev, int) {
          const Field guess = config.guess == GuessPolicy::Previous ? prev : complement(prev);
          std::vector<LevelReport> reports;
          Field next = multilevel_step(prev, guess, config.schedule, p, config.tol, opts, &reports);
          for (const auto& lr : reports) {
            r.totals.minimize_iterations += lr.minimize.outer_iterations;
            r.totals.linear_iterations += lr.minimize.linear_iterations;
            r.totals.steepest_descent_steps += lr.minimize.steepest_descent_steps;
          }
          if (!reports.empty())
            r.totals.max_final_residual =
                std::max(r.totals.max_final_residual, reports.back().minimize.final_gradient_norm);
          return next;
        };
      }
      auto observer = [&](int step, double t, const Field& u) {
        rec(step, t, u);
        progress(quiet, config, step, n_steps);
      };
      EvolutionRecord er = evolve(stepper, u0, p, config.t_end, {}, observer);
      r.final_state = std::move(er.final_state);
    }
  } catch (const StepFailure& e) {
    r.failure = RunFailure{module_of(config.method), e.what(), e.step(), e.iterations(), e.residual()};
  } catch (const SolverError& e) {
    r.failure = RunFailure{module_of(config.method), e.what(), 0, e.iterations(), e.residual()};
  } catch (const NonFiniteValue& e) {
    const int step = r.steps.empty() ? 0 : r.steps.back() + 1;
    r.failure = RunFailure{module_of(config.method), e.what(), step, 0, std::nan("")};
  }
  rec.finish();
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::string summary_json(const RunResult& r) {
  const RunConfig& c = r.config;
  json j;
  j["name"] = c.name;
  j["status"] = r.failure ? "failed" : "ok";
  j["method"] = to_string(c.method);
  if (c.method == MethodKind::Scheme) j["scheme"] = to_string(c.scheme);
  if (c.method == MethodKind::Minimize) {
    j["functional"] = to_string(c.functional);
    j["delta"] = c.delta;
  }
  if (c.method == MethodKind::Minimize || c.method == MethodKind::Multilevel)
    j["guess"] = guess_name(c.guess);
  if (c.method != MethodKind::LevelSet) j["eps"] = c.eps;
  j["k"] = c.k;
  j["t_end"] = c.t_end;
  j["grid_n"] = c.grid.n;
  j["h"] = c.grid.h();
  j["steps"] = r.steps.empty() ? 0 : r.steps.back();
  j["final_time"] = r.final_time;
  j["classification"] = to_string(r.topology.classification);
  j["peak_component_count"] = r.topology.peak_count();
  j["final_component_count"] =
      r.topology.component_counts.empty() ? 0 : r.topology.component_counts.back();
  json events = json::array();
  for (const auto& e : r.topology.events) events.push_back({{"type", to_string(e.type)}, {"time", e.time}});
  j["events"] = events;
  if (!r.energies.empty()) {
    j["initial_energy"] = r.energies.front();
    j["final_energy"] = r.energies.back();
  }
  if (!r.radii.empty()) {
    j["initial_radius"] = r.radii.front().second;
    j["final_radius"] = r.radii.back().second;
  }
  j["solver"] = {{"newton_iterations", r.totals.newton_iterations},
                 {"linear_iterations", r.totals.linear_iterations},
                 {"minimize_iterations", r.totals.minimize_iterations},
                 {"steepest_descent_steps", r.totals.steepest_descent_steps},
                 {"max_final_residual", r.totals.max_final_residual}};
  if (r.failure) {
    const RunFailure& f = *r.failure;
    json fj = {{"module", f.module}, {"message", f.message}, {"step", f.step},
               {"iterations", f.iterations}};
    if (std::isfinite(f.residual))
      fj["residual"] = f.residual;
    else
      fj["residual"] = nullptr;
    j["failure"] = fj;
  }
  return j.dump(2) + "\n";
}

void write_artifacts(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!r.energies.empty()) {
    CsvTable t{{"step", "time", "J_eps"}, {}};
    for (std::size_t i = 0; i < r.energies.size(); ++i)
      t.rows.push_back({std::to_string(r.steps[i]), format_scientific(r.times[i]),
                        format_scientific(r.energies[i])});
    write_csv(dir / "energy.csv", t);
  }
  {
    CsvTable t{{"time", "component_count", "event"}, {}};
    const auto& tl = r.topology;
    for (std::size_t i = 0; i < tl.times.size(); ++i) {
      std::string ev;
      for (const auto& e : tl.events)
        if (e.time == tl.times[i]) ev += (ev.empty() ? "" : ";") + std::string(to_string(e.type));
      t.rows.push_back({format_scientific(tl.times[i]), std::to_string(tl.component_counts[i]), ev});
    }
    write_csv(dir / "topology.csv", t);
  }
  if (r.config.record_radius) {
    CsvTable t{{"time", "radius"}, {}};
    for (const auto& [time, rad] : r.radii) t.rows.push_back({format_scientific(time), format_scientific(rad)});
    write_csv(dir / "radius.csv", t);
  }
  const bool levelset = r.config.method == MethodKind::LevelSet;
  const double h = r.config.grid.h();
  for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
    const auto& [t, field] = r.snapshots[s];
    char name[32];
    std::snprintf(name, sizeof name, "snap_%03zu", s);
    // Level-set values are distances; map a band of +-4h onto the gray scale.
    if (levelset)
      write_pgm(dir / "snapshots" / (std::string(name) + ".pgm"), field, -4.0 * h, 4.0 * h);
    else
      write_pgm(dir / "snapshots" / (std::string(name) + ".pgm"), field);
    write_nodal_csv(dir / "snapshots" / (std::string(name) + ".csv"), field);
  }
  if (!r.snapshots.empty()) {
    CsvTable t{{"index", "time", "file"}, {}};
    for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%03zu", s);
      t.rows.push_back({std::to_string(s), format_scientific(r.snapshots[s].first), name});
    }
    write_csv(dir / "snapshots" / "index.csv", t);
  }
  write_text(dir / "config.txt", to_text(r.config));
  write_text(dir / "summary.json", summary_json(r));
  json timing = {{"runtime_seconds", r.runtime_seconds}};
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

std::optional<double> max_radius_deviation(const RunResult& a, const RunResult& b) {
  std::optional<double> out;
  std::size_t j = 0;
  for (const auto& [t, ra] : a.radii) {
    while (j < b.radii.size() && b.radii[j].first < t * (1 - 1e-12) - 1e-300) ++j;
    if (j == b.radii.size()) break;
    if (std::abs(b.radii[j].first - t) <= 1e-12 * std::max(std::abs(t), 1e-300) ||
        b.radii[j].first == t) {
      const double d = std::abs(ra - b.radii[j].second);
      out = out ? std::max(*out, d) : d;
    }
  }
  return out;
}

CsvTable compare_table(const std::vector<RunResult>& results) {
  CsvTable t{{"name", "method", "eps", "delta", "k", "classification", "final_time",
              "peak_component_count", "status"},
             {}};
  for (const auto& r : results) {
    const RunConfig& c = r.config;
    std::string method = to_string(c.method);
    if (c.method == MethodKind::Scheme) method += std::string(":") + to_string(c.scheme);
    if (c.method == MethodKind::Minimize) method += std::string(":") + to_string(c.functional);
    t.rows.push_back({c.name, method,
                      c.method == MethodKind::LevelSet ? "" : format_scientific(c.eps),
                      c.method == MethodKind::Minimize ? format_scientific(c.delta) : "",
                      format_scientific(c.k),
                      r.failure ? "failed" : to_string(r.topology.classification),
                      format_scientific(r.final_time), std::to_string(r.topology.peak_count()),
                      r.failure ? "failed" : "ok"});
  }
  return t;
}

std::optional<CsvTable> radius_deviation_table(const std::vector<RunResult>& results) {
  for (const auto& r : results)
    if (!r.config.record_radius || r.radii.empty()) return std::nullopt;
  CsvTable t{{"run_a", "run_b", "max_radius_deviation"}, {}};
  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const auto d = max_radius_deviation(results[a], results[b]);
      t.rows.push_back({results[a].config.name, results[b].config.name,
                        d ? format_scientific(*d) : "nan"});
    }
  return t;
}

}  // namespace mcflow
