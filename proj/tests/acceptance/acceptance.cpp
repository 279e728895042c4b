// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: mcflow_acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcflow/bench.hpp"
#include "mcflow/config.hpp"
#include "mcflow/discretization.hpp"
#include "mcflow/energy.hpp"
#include "mcflow/minimize.hpp"
#include "mcflow/runner.hpp"
#include "mcflow/schemes.hpp"

using namespace mcflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
  }
  // Reported, not judged.
  void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

fs::path artifact_root() {
  const char* env = std::getenv("MCFLOW_ACCEPTANCE_OUT");
  return env && *env ? fs::path(env) : fs::current_path() / "acceptance_runs";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Runs a shipped config, keeps its artifacts, and memoizes the result.
const RunResult& run_config(const std::string& name) {
  static std::map<std::string, RunResult> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const RunConfig cfg = load_config(fs::path(MCFLOW_CONFIG_DIR) / (name + ".cfg"));
  RunResult r = execute(cfg);
  write_artifacts(r, artifact_root() / name);
  std::cerr << "  [" << name << "] " << to_string(r.topology.classification) << " in "
            << fmt(r.runtime_seconds) << " s" << (r.failure ? " (solver failure)" : "") << "\n";
  return cache.emplace(name, std::move(r)).first->second;
}

std::string classification(const RunResult& r) {
  return r.failure ? "failed" : to_string(r.topology.classification);
}

void expect_class(Outcome& o, const std::string& name, const char* want) {
  const RunResult& r = run_config(name);
  const std::string got = classification(r);
  o.require(got == want, name + "=" + got);
}

Field random_field(const GridSpec& g, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(g.node_count());
  for (double& x : v) x = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  return Field(g, std::move(v));
}

Field difference(const Field& a, const Field& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values()[i] - b.values()[i];
  return Field(a.grid(), std::move(d));
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

// --- criteria --------------------------------------------------------------

Outcome shrinking_circle() {
  Outcome o;
  const char* names[] = {"test1_fis", "test1_css", "test1_semi", "test1_mcn"};
  std::vector<const RunResult*> runs;
  for (const char* n : names) {
    const RunResult& r = run_config(n);
    runs.push_back(&r);
    const double h = r.config.grid.h();
    double worst = 0.0;
    for (const auto& [t, rad] : r.radii)
      worst = std::max(worst, std::abs(rad - std::sqrt(0.04 - 2 * t)));
    const bool covered = !r.radii.empty() && r.radii.back().first >= 0.015 - 1e-12;
    const std::string what = std::string(n) + " max|R-law|=" + fmt(worst) + " (2h=" + fmt(2 * h) + ")";
    // The radius law is required of FIS; the other schemes are held to FIS
    // through the pairwise check below.
    if (runs.size() == 1)
      o.require(!r.failure && covered && worst <= 2 * h, what);
    else
      o.note(what + (r.failure || !covered ? " incomplete" : ""));
    if (runs.size() > 1 && (r.failure || !covered)) o.require(false, std::string(n) + " did not reach t=0.015");
  }
  double pair = 0.0;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const auto d = max_radius_deviation(*runs[a], *runs[b]);
      pair = std::max(pair, d ? *d : INFINITY);
    }
  o.require(pair <= 2 * runs[0]->config.grid.h(), "pairwise max deviation=" + fmt(pair));
  return o;
}

Outcome reduced_length_equivalence() {
  Outcome o;
  const GridSpec g = GridSpec::unit_box(32);  // 33 x 33 nodes
  const StepParams pen{0.02, 5e-5, 3.0, Functional::Penalized};
  const StepParams reduced{0.01, 5e-5};
  const double tol = 1e-9;
  NewtonConfig cfg;
  cfg.tol = tol;
  double worst_res = 0.0, worst_diff = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field prev = random_field(g, seed, -0.9, 0.9);
    const Field u = minimize_functional(Functional::Penalized, prev, prev, pen, tol).first;
    worst_res = std::max(worst_res, lumped_norm(scheme_residual(SchemeId::FIS, u, prev, reduced)));
    const Field fis = step_scheme(SchemeId::FIS, prev, reduced, cfg);
    worst_diff = std::max(worst_diff, lumped_norm(difference(fis, u)));
  }
  o.require(worst_res <= 1e-7, "FIS residual at eps'=" + fmt(worst_res));
  o.require(worst_diff <= 1e-7, "|FIS - argmin|=" + fmt(worst_diff));
  return o;
}

Outcome distant_circles() {
  Outcome o;
  for (const char* n : {"test2_levelset", "test2_fis", "test2_min"}) expect_class(o, n, "separate");
  return o;
}

Outcome close_circles() {
  Outcome o;
  expect_class(o, "test3_levelset", "separate");
  expect_class(o, "test3_fis_eps01", "merge");
  expect_class(o, "test3_min_eps01", "merge");
  expect_class(o, "test3_fis_eps002", "separate");
  expect_class(o, "test3_min_eps002", "separate");
  return o;
}

Outcome penalized_circles() {
  Outcome o;
  expect_class(o, "test5_penalized", "separate");
  return o;
}

Outcome wedges() {
  Outcome o;
  expect_class(o, "test4_levelset", "merge");
  expect_class(o, "test4_fis_eps01", "separate");
  expect_class(o, "test4_min_eps01", "separate");
  expect_class(o, "test4_fis_eps0033", "merge");
  expect_class(o, "test4_min_eps0033", "merge");
  expect_class(o, "test6_penalized", "merge");
  return o;
}

// u along y = 0 at every x node (bilinear in y when no node row sits there).
std::vector<double> centre_line(const Field& u) {
  std::vector<double> out;
  for (int i = 0; i <= u.grid().n; ++i) out.push_back(sample_bilinear(u, u.grid().x(i), 0.0));
  return out;
}

double max_line_diff(const Field& a, const Field& b) {
  const auto la = centre_line(a), lb = centre_line(b);
  double m = 0.0;
  for (std::size_t i = 0; i < la.size(); ++i) m = std::max(m, std::abs(la[i] - lb[i]));
  return m;
}

Outcome multilevel_recovery() {
  Outcome o;
  const RunResult& ref = run_config("test8_reference");
  const RunResult& single = run_config("test8_single");
  const RunResult& ml = run_config("test8_multilevel");
  if (ref.failure || single.failure || ml.failure || !ref.final_state || !single.final_state ||
      !ml.final_state) {
    o.require(false, "a Test 8 run failed");
    return o;
  }
  o.require(std::abs(ml.final_time - 0.001) < 1e-12, "t=" + fmt(ml.final_time));
  const double dm = max_line_diff(*ml.final_state, *ref.final_state);
  const double ds = max_line_diff(*single.final_state, *ref.final_state);
  o.require(dm <= 1e-3, "multilevel vs reference=" + fmt(dm));
  o.require(ds >= 0.5, "single-level vs reference=" + fmt(ds));
  return o;
}

Outcome multilevel_topology() {
  Outcome o;
  expect_class(o, "test9_multilevel", "separate");
  const std::string single = classification(run_config("test9_single"));
  o.require(single != "separate", "test9_single=" + single + " (must not be separate)");
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MCFLOW_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome property_suite() {
  Outcome o;
  // Gradient vs central differences, all functionals.
  {
    const GridSpec g = GridSpec::unit_box(8);
    double worst = 0.0;
    for (Functional f : {Functional::Plain, Functional::Penalized, Functional::ScaledRemark}) {
      const StepParams p{0.3, 0.01, f == Functional::ScaledRemark ? 0.4 : 2.5, f};
      for (std::uint64_t s = 0; s < 10; ++s) {
        const Field u = random_field(g, 10 + s, -1, 1), prev = random_field(g, 30 + s, -1, 1);
        const Field v = random_field(g, 50 + s, -1, 1);
        const double analytic = lumped_inner_product(energy_gradient(u, prev, p), v);
        const double sig = 1e-5;
        std::vector<double> up(u.size()), um(u.size());
        for (std::size_t i = 0; i < up.size(); ++i) {
          up[i] = u.values()[i] + sig * v.values()[i];
          um[i] = u.values()[i] - sig * v.values()[i];
        }
        const double fd = (functional_value(Field(g, up), prev, p) - functional_value(Field(g, um), prev, p)) /
                          (2 * sig);
        worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(analytic)));
      }
    }
    o.require(worst <= 1e-6, "gradient FD rel err=" + fmt(worst));
  }
  // Energy monotonicity of FIS and CSS trajectories (circle, k <= eps^2).
  {
    const GridSpec g = GridSpec::with_spacing(GridSpec::unit_box(1), 0.01);
    const Field u0 = make_initial_condition({Circle{0, 0, 0.2}, TanhProfile{0.02}}, g);
    double worst = -INFINITY;
    for (SchemeId id : {SchemeId::FIS, SchemeId::ConvexSplitting}) {
      const EvolutionRecord rec = run_evolution(id, u0, {0.02, 2e-4}, 0.01);
      for (std::size_t i = 1; i < rec.energies.size(); ++i)
        worst = std::max(worst, rec.energies[i] - rec.energies[i - 1]);
    }
    o.require(worst <= 1e-10, "max energy increase=" + fmt(worst));
  }
  // Stationarity certificates and descent of minimizers.
  {
    const GridSpec g = GridSpec::unit_box(16);
    const double tol = 1e-8;
    bool ok = true;
    for (Functional f : {Functional::Plain, Functional::Penalized, Functional::ScaledRemark}) {
      const StepParams p{0.05, 1e-3, f == Functional::ScaledRemark ? 0.4 : 2.0, f};
      for (std::uint64_t s = 0; s < 3; ++s) {
        const Field prev = random_field(g, 70 + s, -1, 1);
        auto [u, rep] = minimize_functional(f, random_field(g, 90 + s, -1, 1), prev, p, tol);
        ok = ok && lumped_norm(energy_gradient(u, prev, p)) <= tol;
        for (std::size_t i = 1; i < rep.energy_trace.size(); ++i)
          ok = ok && rep.energy_trace[i] <= rep.energy_trace[i - 1];
      }
    }
    o.require(ok, "minimizer certificates");
  }
  // Laplacian symmetry and semidefiniteness.
  {
    const GridSpec g = GridSpec::unit_box(12);
    double asym = 0.0, maxq = -INFINITY;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Field f = random_field(g, 110 + s, -1, 1), q = random_field(g, 120 + s, -1, 1);
      const double a = lumped_inner_product(apply_neumann_laplacian(f), q);
      const double b = lumped_inner_product(f, apply_neumann_laplacian(q));
      asym = std::max(asym, std::abs(a - b) / (std::abs(a) + 1.0));
      maxq = std::max(maxq, lumped_inner_product(apply_neumann_laplacian(f), f));
    }
    o.require(asym <= 1e-10 && maxq <= 0.0, "laplacian asym=" + fmt(asym) + " max(Lf,f)=" + fmt(maxq));
  }
  // Prolongation exact on linears.
  {
    auto lin = [](double x, double y) { return 0.7 - 1.3 * x + 2.1 * y; };
    const GridSpec c = GridSpec::unit_box(10);
    double err = 0.0;
    for (int n : {20, 40, 33}) {
      const GridSpec f = GridSpec::unit_box(n);
      err = std::max(err, max_abs(difference(prolongate(Field::sample(c, lin), f), Field::sample(f, lin))));
    }
    o.require(err <= 1e-13, "prolongation error on linears=" + fmt(err));
  }
  // CLI reruns are byte-identical.
  {
    const fs::path dir = artifact_root() / "rerun";
    fs::remove_all(dir);
    fs::create_directories(dir);
    RunConfig c;
    c.name = "rerun";
    c.method = MethodKind::Minimize;
    c.functional = Functional::Penalized;
    c.delta = 2.0;
    c.eps = 0.04;
    c.k = 1e-3;
    c.t_end = 0.01;
    c.record_radius = true;
    c.snapshot_times = {0.0, 0.005};
    c.grid = GridSpec::unit_box(32);
    c.ic = {TwoCircles{0.05, 0.14}, TanhProfile{0.04}};
    {
      std::ofstream out(dir / "rerun.cfg");
      out << to_text(c);
    }
    const int ea = run_cli("run " + (dir / "rerun.cfg").string() + " --quiet --output-dir " + (dir / "a").string());
    const int eb = run_cli("run " + (dir / "rerun.cfg").string() + " --quiet --output-dir " + (dir / "b").string());
    bool same = ea == 0 && eb == 0;
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
      if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
      ++files;
      const fs::path other = dir / "b" / fs::relative(e.path(), dir / "a");
      same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    o.require(same && files > 5, "byte-identical rerun over " + std::to_string(files) + " files");
  }
  return o;
}

std::string event_sequence(const RunResult& r) {
  std::string s;
  for (TopologyEvent e : r.topology.event_types()) s += std::string(s.empty() ? "" : ",") + to_string(e);
  return "[" + s + "]";
}

Outcome random_pattern() {
  Outcome o;
  const RunResult& ls = run_config("test7_levelset");
  const RunResult& pen = run_config("test7_penalized");
  const RunResult& plain = run_config("test7_plain");
  if (ls.failure || pen.failure || plain.failure) {
    o.require(false, "a Test 7 run failed");
    return o;
  }
  const auto a = ls.topology.event_types(), b = pen.topology.event_types(),
             c = plain.topology.event_types();
  o.require(b == a, "penalized " + event_sequence(pen) + " vs level set " + event_sequence(ls));
  o.require(c != a, "plain " + event_sequence(plain) + " differs");
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "shrinking circle, four schemes", shrinking_circle},
      {2, "penalized minimizer equals FIS at the reduced length", reduced_length_equivalence},
      {3, "distant circles separate for all methods", distant_circles},
      {4, "close circles: eps decides merge vs separate", close_circles},
      {5, "penalized close circles separate", penalized_circles},
      {6, "wedges: eps-dependence of the merge", wedges},
      {7, "multilevel recovers the reference from a bad guess", multilevel_recovery},
      {8, "multilevel close circles separate", multilevel_topology},
      {9, "property suite", property_suite},
      {10, "random field: penalized follows the level-set pattern", random_pattern},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " - " << c.title
              << " (" << o.detail.str() << ") [" << fmt(secs) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
