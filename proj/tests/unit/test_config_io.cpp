#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mcflow/config.hpp"
#include "mcflow/io.hpp"

using namespace mcflow;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(# comment
[run]
name = tiny
method = scheme
scheme = css
eps = 0.05
k = 1e-3
t_end = 0.01

[grid]
n = 20

[ic]
shape = circle
radius = 0.2
center = 0.05, -0.1
profile = tanh
profile_eps = 0.05
)";

std::string with_line(const std::string& base, const std::string& section, const std::string& line) {
  std::string s = base;
  const std::size_t at = s.find("[" + section + "]");
  REQUIRE(at != std::string::npos);
  const std::size_t eol = s.find('\n', at);
  s.insert(eol + 1, line + "\n");
  return s;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const std::size_t at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcflow_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("minimal config parses") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.name == "tiny");
  CHECK(c.method == MethodKind::Scheme);
  CHECK(c.scheme == SchemeId::ConvexSplitting);
  CHECK(c.grid.n == 20);
  CHECK(c.grid.x_min == -0.5);
  const auto& circle = std::get<Circle>(c.ic.shape);
  CHECK(circle.cx == 0.05);
  CHECK(circle.cy == -0.1);
  CHECK(std::get<TanhProfile>(c.ic.profile).eps == 0.05);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("every shipped config round-trips through its echo") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(MCFLOW_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    INFO(entry.path().string());
    const RunConfig c = load_config(entry.path());
    CHECK_NOTHROW(c.validate());
    CHECK(parse_config(to_text(c)) == c);
    CHECK(to_text(parse_config(to_text(c))) == to_text(c));
  }
  CHECK(seen >= 20);
}

TEST_CASE("h and n are alternatives") {
  const RunConfig c = parse_config(replace(kMinimal, "n = 20", "h = 0.025"));
  CHECK(c.grid.n == 40);
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "grid", "h = 0.05")), ConfigError);
}

TEST_CASE("rejections") {
  const std::pair<std::string, std::string> bad[] = {
      {"unknown key", with_line(kMinimal, "run", "colour = blue")},
      {"duplicate key", with_line(kMinimal, "run", "k = 1e-3")},
      {"unknown section", std::string(kMinimal) + "[extra]\na = 1\n"},
      {"key outside a section", "k = 1\n" + std::string(kMinimal)},
      {"malformed number", replace(kMinimal, "k = 1e-3", "k = 1e-3x")},
      {"negative k", replace(kMinimal, "k = 1e-3", "k = -1e-3")},
      {"unknown method", replace(kMinimal, "method = scheme", "method = magic")},
      {"unknown scheme", replace(kMinimal, "scheme = css", "scheme = rk4")},
      {"delta for a scheme run", with_line(kMinimal, "run", "delta = 2")},
      {"gap for a circle", with_line(kMinimal, "ic", "gap = 0.1")},
      {"circle out of the box", replace(kMinimal, "radius = 0.2", "radius = 0.48")},
      {"snapshot after t_end", with_line(kMinimal, "run", "snapshot_times = 0, 0.02")},
      {"missing section line", replace(kMinimal, "[grid]", "grid")},
      {"bad boolean", with_line(kMinimal, "run", "radius = maybe")},
      {"multilevel section for a scheme run", std::string(kMinimal) + "[multilevel]\nlevels = 0.05 0.05\n"},
      {"name with a slash", replace(kMinimal, "name = tiny", "name = a/b")},
  };
  for (const auto& [what, text] : bad) {
    INFO(what);
    CHECK_THROWS_AS(parse_config(text).validate(), ConfigError);
  }
}

TEST_CASE("errors name the line") {
  try {
    (void)parse_config(replace(kMinimal, "k = 1e-3", "k = nope"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("level-set stability bound is checked at parse time") {
  std::string t = replace(kMinimal, "method = scheme\nscheme = css\neps = 0.05\n", "method = levelset\n");
  t = replace(t, "profile = tanh\nprofile_eps = 0.05", "profile = signed_distance");
  CHECK_THROWS_AS(parse_config(t).validate(), ConfigError);
  const RunConfig ok = parse_config(replace(t, "k = 1e-3", "k = 1e-4"));
  CHECK(ok.method == MethodKind::LevelSet);
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("multilevel schedule must end at the target") {
  std::string t = replace(kMinimal, "method = scheme\nscheme = css\n", "method = multilevel\nguess = complement\n");
  CHECK_THROWS_AS(parse_config(t + "[multilevel]\nlevels = 0.1 0.1, 0.05 0.06\n").validate(), ConfigError);
  const RunConfig c = parse_config(t + "[multilevel]\nlevels = 0.1 0.1, 0.05 0.05\nconvex_start = strict\n");
  CHECK(c.schedule.levels.size() == 2);
  CHECK(c.convex_start == ConvexStart::Strict);
  CHECK(c.guess == GuessPolicy::Complement);
  CHECK_NOTHROW(c.validate());
  CHECK(parse_config(to_text(c)) == c);
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-5) == "1e-05");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("format_scientific") {
  CHECK(format_scientific(0.0) == "0.0000000000000000e+00");
  CHECK(format_scientific(0.1) == "1.0000000000000001e-01");
  CHECK(format_scientific(-0.25) == "-2.5000000000000000e-01");
  CHECK(format_scientific(-2.5e-7) == "-2.4999999999999999e-07");
  for (double v : {1.0 / 3.0, 12345.678, -9.87e-300}) CHECK(std::stod(format_scientific(v)) == v);
}

TEST_CASE("CSV write and read back") {
  const fs::path dir = scratch("csv");
  CsvTable t{{"step", "time", "value"}, {{"0", "0.0", "1"}, {"1", "0.5", "-2"}}};
  CHECK(render_csv(t) == "step,time,value\n0,0.0,1\n1,0.5,-2\n");
  write_csv(dir / "sub" / "t.csv", t);
  const CsvTable r = read_csv(dir / "sub" / "t.csv");
  CHECK(r.header == t.header);
  CHECK(r.rows == t.rows);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), Error);
  fs::remove_all(dir);
}

TEST_CASE("PGM rendering") {
  const GridSpec g = GridSpec::unit_box(1);  // 2 x 2 nodes
  Field u(g);
  u(0, 0) = -1.0;  // bottom left
  u(1, 0) = 0.0;
  u(0, 1) = 1.0;   // top left
  u(1, 1) = 5.0;   // clamped
  const std::string s = render_pgm(u);
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(s.size() == header.size() + 4);
  CHECK(s.substr(0, header.size()) == header);
  const auto px = [&](std::size_t i) { return static_cast<unsigned char>(s[header.size() + i]); };
  CHECK(px(0) == 255);  // top row first
  CHECK(px(1) == 255);
  CHECK(px(2) == 0);
  CHECK(px(3) == 128);
}

TEST_CASE("nodal CSV") {
  const fs::path dir = scratch("nodal");
  write_nodal_csv(dir / "u.csv", Field(GridSpec::unit_box(1), 0.25));
  const CsvTable t = read_csv(dir / "u.csv");
  CHECK(t.header == std::vector<std::string>{"i", "j", "x", "y", "value"});
  CHECK(t.rows.size() == 4);
  CHECK(std::stod(t.rows[3][4]) == 0.25);
  fs::remove_all(dir);
}

TEST_CASE("line plot") {
  const std::string img = render_line_plot({{"a", {0, 1, 2}, {1, 0, 1}}}, 64, 48);
  CHECK(img.rfind("P5\n64 48\n255\n", 0) == 0);
  CHECK(img.size() == std::string("P5\n64 48\n255\n").size() + 64 * 48);
  CHECK(render_line_plot({{"a", {0, 1, 2}, {1, 0, 1}}}, 64, 48) == img);
  CHECK_THROWS_AS(render_line_plot({}), InvalidArgument);

  const fs::path dir = scratch("plot");
  write_csv(dir / "e.csv", {{"step", "time", "J_eps"}, {{"0", "0", "3"}, {"1", "0.1", "2"}, {"2", "0.2", "1.5"}}});
  plot_csv(dir / "e.csv", dir / "e.pgm");
  CHECK(slurp(dir / "e.pgm").rfind("P5\n", 0) == 0);
  fs::remove_all(dir);
}

}  // TEST_SUITE
