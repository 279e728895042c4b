#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcflow/bench.hpp"
#include "mcflow/energy.hpp"
#include "mcflow/error.hpp"
#include "mcflow/grid.hpp"
#include "mcflow/minimize.hpp"
#include "mcflow/schemes.hpp"

namespace mcflow {

/// Malformed run configuration; the CLI maps it to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class MethodKind { LevelSet, Scheme, Minimize, Multilevel };

/// Initial guess handed to a minimizer each step.
enum class GuessPolicy {
  Previous,    ///< u^{n-1}
  Complement,  ///< 1 - u^{n-1}
};

struct RunConfig {
  std::string name = "run";
  MethodKind method = MethodKind::Scheme;
  SchemeId scheme = SchemeId::FIS;
  Functional functional = Functional::Plain;
  double delta = 0.0;
  double eps = 0.01;
  double k = 1e-4;
  double t_end = 0.015;
  double tol = 1e-8;
  GuessPolicy guess = GuessPolicy::Previous;
  bool record_radius = false;
  std::vector<double> snapshot_times;
  std::string output_dir;

  GridSpec grid = GridSpec{-0.5, 0.5, -0.5, 0.5, 200};
  InitialCondition ic;

  MultilevelSchedule schedule;
  ConvexStart convex_start = ConvexStart::Anchor;

  /// Checks every module-level precondition the run will hit.
  /// Throws ConfigError.
  void validate() const;

  StepParams step_params() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the sectioned key = value format (see configs/README.md).
/// Unknown sections or keys, keys that do not apply to the selected method
/// or shape, duplicates and malformed values are ConfigErrors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

const char* to_string(MethodKind m) noexcept;
const char* to_string(Functional f) noexcept;

}  // namespace mcflow
