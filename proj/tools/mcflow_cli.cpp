// Command-line front end: run, compare, plot.
//
// Exit status: 0 success, 1 solver failure (or I/O failure while writing
// artifacts), 2 configuration or usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcflow/config.hpp"
#include "mcflow/io.hpp"
#include "mcflow/runner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

constexpr const char* kRootEnv = "MCFLOW_OUTPUT_ROOT";

struct Options {
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

fs::path output_root() {
  if (const char* env = std::getenv(kRootEnv); env && *env) return env;
  return "mcflow_runs";
}

mcflow::RunConfig load(const std::string& path, const Options& opt) {
  mcflow::RunConfig c = mcflow::load_config(path);
  if (opt.seed) {
    if (auto* r = std::get_if<mcflow::RandomField>(&c.ic.shape))
      r->seed = *opt.seed;
    else if (!opt.quiet)
      std::cerr << "note: --seed-override ignored for " << path << " (no random initial data)\n";
  }
  return c;
}

void report(const mcflow::RunResult& r, const fs::path& dir, const Options& opt) {
  if (r.failure) {
    std::cerr << r.config.name << ": FAILED in " << r.failure->module << ": " << r.failure->message
              << "\n";
    return;
  }
  if (!opt.quiet)
    std::cout << r.config.name << ": " << mcflow::to_string(r.topology.classification) << " (t = "
              << r.final_time << ", " << dir.string() << ")\n";
}

int cmd_run(const std::string& path, const Options& opt) {
  const mcflow::RunConfig c = load(path, opt);
  fs::path dir;
  if (!opt.output_dir.empty())
    dir = opt.output_dir;
  else if (!c.output_dir.empty())
    dir = c.output_dir;
  else
    dir = output_root() / c.name;
  const mcflow::RunResult r = mcflow::execute(c, opt.quiet);
  mcflow::write_artifacts(r, dir);
  report(r, dir, opt);
  return r.failure ? kSolverFailure : kOk;
}

int cmd_compare(const std::vector<std::string>& paths, const Options& opt) {
  if (paths.size() < 2) throw mcflow::ConfigError("compare needs at least two configs");
  std::vector<mcflow::RunConfig> configs;
  for (const auto& p : paths) configs.push_back(load(p, opt));
  for (std::size_t a = 0; a < configs.size(); ++a)
    for (std::size_t b = a + 1; b < configs.size(); ++b)
      if (configs[a].name == configs[b].name)
        throw mcflow::ConfigError("compare: run name '" + configs[a].name + "' used twice");
  const fs::path root = opt.output_dir.empty() ? output_root() / "compare" : fs::path(opt.output_dir);
  std::vector<mcflow::RunResult> results;
  bool failed = false;
  for (const auto& c : configs) {
    results.push_back(mcflow::execute(c, opt.quiet));
    mcflow::write_artifacts(results.back(), root / c.name);
    report(results.back(), root / c.name, opt);
    failed = failed || results.back().failure.has_value();
  }
  const mcflow::CsvTable table = mcflow::compare_table(results);
  mcflow::write_csv(root / "compare.csv", table);
  if (auto dev = mcflow::radius_deviation_table(results))
    mcflow::write_csv(root / "radius_deviation.csv", *dev);
  if (!opt.quiet) std::cout << mcflow::render_csv(table);
  return failed ? kSolverFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn / mean curvature flow experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();  // inherited: global flags may follow the subcommand
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--output-dir", opt.output_dir,
                 std::string("Artifact directory (default: $") + kRootEnv + "/<name>, else ./mcflow_runs/<name>)");
  auto* seed_opt = app.add_option("--seed-override", seed, "Replace the seed of random initial data");
  app.add_flag("--quiet", opt.quiet, "Suppress progress and summaries");

  std::string run_path;
  auto* run = app.add_subcommand("run", "Execute one configuration");
  run->add_option("config", run_path)->required();

  std::vector<std::string> compare_paths;
  auto* compare = app.add_subcommand("compare", "Execute several configurations and tabulate them");
  compare->add_option("configs", compare_paths)->required()->expected(2, -1);

  std::string csv_path, out_path;
  auto* plot = app.add_subcommand("plot", "Render the numeric columns of a CSV to a PGM");
  plot->add_option("csv", csv_path)->required();
  plot->add_option("out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) opt.seed = seed;

  try {
    if (*run) return cmd_run(run_path, opt);
    if (*compare) return cmd_compare(compare_paths, opt);
    if (*plot) {
      mcflow::plot_csv(csv_path, out_path);
      return kOk;
    }
  } catch (const mcflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mcflow::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kConfigError;
}
