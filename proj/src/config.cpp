#include "mcflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

namespace mcflow {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

double parse_double(const Entry& e, const std::string& key) {
  const std::string_view s = trim(e.value);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    fail(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
  return v;
}

long long parse_integer(const Entry& e, const std::string& key) {
  const std::string_view s = trim(e.value);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(e.line, "'" + key + "' expects an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t parse_unsigned(const Entry& e, const std::string& key) {
  const std::string_view s = trim(e.value);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(e.line, "'" + key + "' expects an unsigned integer, got '" + e.value + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (auto item : split(e.value, ',')) {
    Entry tmp{std::string(item), e.line};
    out.push_back(parse_double(tmp, key));
  }
  return out;
}

template <class T>
T parse_enum(const Entry& e, const std::string& key,
             std::initializer_list<std::pair<const char*, T>> options) {
  const std::string_view s = trim(e.value);
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    allowed += allowed.empty() ? name : std::string(" | ") + name;
  }
  fail(e.line, "'" + key + "' must be one of " + allowed + ", got '" + e.value + "'");
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section>& sections) : sections_(sections) {}

  const Entry* get(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  void number(const std::string& section, const std::string& key, double& out) {
    if (const Entry* e = get(section, key)) out = parse_double(*e, key);
  }

  // Any entry left unread did not apply to the chosen method/shape.
  void reject_leftovers() const {
    for (const auto& [name, section] : sections_)
      for (const auto& [key, entry] : section)
        if (!entry.used)
          fail(entry.line, "key '" + key + "' is not valid in section [" + name +
                               "] for this configuration");
  }

 private:
  std::map<std::string, Section>& sections_;
};

const std::set<std::string> kSections = {"run", "grid", "ic", "multilevel"};

}  // namespace

const char* to_string(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::LevelSet:
      return "levelset";
    case MethodKind::Scheme:
      return "scheme";
    case MethodKind::Minimize:
      return "minimize";
    case MethodKind::Multilevel:
      return "multilevel";
  }
  return "?";
}

const char* to_string(Functional f) noexcept {
  switch (f) {
    case Functional::Plain:
      return "plain";
    case Functional::Penalized:
      return "penalized";
    case Functional::ScaledRemark:
      return "scaled";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

StepParams RunConfig::step_params() const {
  StepParams p;
  p.eps = eps;
  p.k = k;
  p.delta = method == MethodKind::Minimize ? delta : 0.0;
  p.functional = method == MethodKind::Minimize ? functional : Functional::Plain;
  return p;
}

void RunConfig::validate() const {
  try {
    if (name.empty() || name.find_first_of("/\\ \t") != std::string::npos)
      throw ConfigError("run name must be a non-empty single path component");
    grid.validate();
    validate_geometry(ic, grid);
    if (!(k > 0.0)) throw ConfigError("k must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    for (double t : snapshot_times)
      if (t < 0.0 || t > t_end * (1.0 + 1e-12))
        throw ConfigError("snapshot time " + format_number(t) + " outside [0, t_end]");
    if (method == MethodKind::LevelSet) {
      const double h = grid.h();
      if (k > 0.25 * h * h * (1.0 + 1e-9))
        throw ConfigError("level-set runs need k <= h^2/4");
      return;
    }
    step_params().validate();
    if (method == MethodKind::Multilevel) {
      schedule.validate();
      const ScheduleLevel& last = schedule.levels.back();
      if (!(GridSpec::with_spacing(grid, last.h) == grid))
        throw ConfigError("last multilevel level must match the grid spacing");
      if (std::abs(last.eps - eps) > 1e-12 * eps)
        throw ConfigError("last multilevel level must match eps");
      effective_schedule(schedule, k, convex_start);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(current)) fail(line_no, "unknown section [" + current + "]");
      if (sections.count(current)) fail(line_no, "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (current.empty()) fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) fail(line_no, "empty key");
    auto& sec = sections[current];
    if (sec.count(key)) fail(line_no, "duplicate key '" + key + "'");
    sec[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }

  Reader rd(sections);
  RunConfig c;

  if (const Entry* e = rd.get("run", "name")) c.name = e->value;
  if (const Entry* e = rd.get("run", "method"))
    c.method = parse_enum<MethodKind>(*e, "method",
                                      {{"levelset", MethodKind::LevelSet},
                                       {"scheme", MethodKind::Scheme},
                                       {"minimize", MethodKind::Minimize},
                                       {"multilevel", MethodKind::Multilevel}});
  rd.number("run", "k", c.k);
  rd.number("run", "t_end", c.t_end);
  if (const Entry* e = rd.get("run", "snapshot_times")) c.snapshot_times = parse_list(*e, "snapshot_times");
  if (const Entry* e = rd.get("run", "radius"))
    c.record_radius = parse_enum<bool>(*e, "radius", {{"true", true}, {"false", false}});
  if (const Entry* e = rd.get("run", "output_dir")) c.output_dir = e->value;

  if (c.method != MethodKind::LevelSet) {
    rd.number("run", "eps", c.eps);
    rd.number("run", "tol", c.tol);
  }
  if (c.method == MethodKind::Scheme) {
    if (const Entry* e = rd.get("run", "scheme"))
      c.scheme = parse_enum<SchemeId>(*e, "scheme",
                                      {{"fis", SchemeId::FIS},
                                       {"css", SchemeId::ConvexSplitting},
                                       {"semi", SchemeId::SemiImplicit},
                                       {"mcn", SchemeId::ModifiedCN}});
  }
  if (c.method == MethodKind::Minimize) {
    if (const Entry* e = rd.get("run", "functional"))
      c.functional = parse_enum<Functional>(*e, "functional",
                                            {{"plain", Functional::Plain},
                                             {"penalized", Functional::Penalized},
                                             {"scaled", Functional::ScaledRemark}});
    rd.number("run", "delta", c.delta);
  }
  if (c.method == MethodKind::Minimize || c.method == MethodKind::Multilevel) {
    if (const Entry* e = rd.get("run", "guess"))
      c.guess = parse_enum<GuessPolicy>(
          *e, "guess", {{"previous", GuessPolicy::Previous}, {"complement", GuessPolicy::Complement}});
  }

  rd.number("grid", "x_min", c.grid.x_min);
  rd.number("grid", "x_max", c.grid.x_max);
  rd.number("grid", "y_min", c.grid.y_min);
  rd.number("grid", "y_max", c.grid.y_max);
  {
    const Entry* n = rd.get("grid", "n");
    const Entry* h = rd.get("grid", "h");
    if (n && h) fail(h->line, "give either 'n' or 'h' in [grid], not both");
    if (n) {
      const long long v = parse_integer(*n, "n");
      if (v <= 0 || v > 100000) fail(n->line, "'n' must lie in [1, 100000]");
      c.grid.n = static_cast<int>(v);
    }
    if (h) {
      const double hv = parse_double(*h, "h");
      if (!(hv > 0.0)) fail(h->line, "'h' must be positive");
      c.grid.n = std::max(1, static_cast<int>(std::lround((c.grid.x_max - c.grid.x_min) / hv)));
    }
  }

  if (const Entry* e = rd.get("ic", "shape")) {
    const auto which = parse_enum<int>(*e, "shape",
                                       {{"circle", 0},
                                        {"two_circles", 1},
                                        {"wedges", 2},
                                        {"random", 3},
                                        {"constant", 4}});
    switch (which) {
      case 0: c.ic.shape = Circle{}; break;
      case 1: c.ic.shape = TwoCircles{}; break;
      case 2: c.ic.shape = Wedges{}; break;
      case 3: c.ic.shape = RandomField{}; break;
      default: c.ic.shape = Constant{}; break;
    }
  }
  if (const Entry* e = rd.get("ic", "profile")) {
    if (parse_enum<bool>(*e, "profile", {{"tanh", true}, {"signed_distance", false}}))
      c.ic.profile = TanhProfile{};
    else
      c.ic.profile = SignedDistance{};
  }
  if (auto* t = std::get_if<TanhProfile>(&c.ic.profile)) rd.number("ic", "profile_eps", t->eps);
  if (auto* s = std::get_if<Circle>(&c.ic.shape)) {
    rd.number("ic", "radius", s->radius);
    if (const Entry* e = rd.get("ic", "center")) {
      const auto xy = parse_list(*e, "center");
      if (xy.size() != 2) fail(e->line, "'center' expects two numbers");
      s->cx = xy[0];
      s->cy = xy[1];
    }
  } else if (auto* s = std::get_if<TwoCircles>(&c.ic.shape)) {
    rd.number("ic", "radius", s->radius);
    rd.number("ic", "gap", s->gap);
  } else if (auto* s = std::get_if<Wedges>(&c.ic.shape)) {
    rd.number("ic", "M", s->M);
  } else if (auto* s = std::get_if<RandomField>(&c.ic.shape)) {
    if (const Entry* e = rd.get("ic", "seed")) s->seed = parse_unsigned(*e, "seed");
    if (const Entry* e = rd.get("ic", "presmooth_steps")) {
      const long long v = parse_integer(*e, "presmooth_steps");
      if (v < 0 || v > 1000000) fail(e->line, "'presmooth_steps' out of range");
      s->presmooth_steps = static_cast<int>(v);
    }
    rd.number("ic", "presmooth_k", s->presmooth_k);
    rd.number("ic", "presmooth_eps", s->presmooth_eps);
  } else if (auto* s = std::get_if<Constant>(&c.ic.shape)) {
    rd.number("ic", "value", s->value);
  }

  if (c.method == MethodKind::Multilevel) {
    if (!rd.has_section("multilevel")) fail(0, "method = multilevel needs a [multilevel] section");
    const Entry* e = rd.get("multilevel", "levels");
    if (!e) fail(0, "[multilevel] needs 'levels'");
    for (auto item : split(e->value, ',')) {
      std::istringstream parts{std::string(item)};
      std::string hs, es, extra;
      parts >> hs >> es;
      if (hs.empty() || es.empty() || (parts >> extra))
        fail(e->line, "each level is 'h eps', got '" + std::string(item) + "'");
      c.schedule.levels.push_back(
          {parse_double(Entry{hs, e->line}, "levels"), parse_double(Entry{es, e->line}, "levels")});
    }
    if (const Entry* cs = rd.get("multilevel", "convex_start"))
      c.convex_start = parse_enum<ConvexStart>(*cs, "convex_start",
                                               {{"anchor", ConvexStart::Anchor},
                                                {"strict", ConvexStart::Strict},
                                                {"unchecked", ConvexStart::Unchecked}});
  }

  rd.reject_leftovers();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  auto num = [](double v) { return format_number(v); };
  o << "[run]\n";
  o << "name = " << c.name << "\n";
  o << "method = " << to_string(c.method) << "\n";
  if (c.method == MethodKind::Scheme) o << "scheme = " << to_string(c.scheme) << "\n";
  if (c.method == MethodKind::Minimize) {
    o << "functional = " << to_string(c.functional) << "\n";
    o << "delta = " << num(c.delta) << "\n";
  }
  if (c.method != MethodKind::LevelSet) o << "eps = " << num(c.eps) << "\n";
  o << "k = " << num(c.k) << "\n";
  o << "t_end = " << num(c.t_end) << "\n";
  if (c.method != MethodKind::LevelSet) o << "tol = " << num(c.tol) << "\n";
  if (c.method == MethodKind::Minimize || c.method == MethodKind::Multilevel)
    o << "guess = " << (c.guess == GuessPolicy::Previous ? "previous" : "complement") << "\n";
  o << "snapshot_times = ";
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
    o << (i ? ", " : "") << num(c.snapshot_times[i]);
  o << "\n";
  o << "radius = " << (c.record_radius ? "true" : "false") << "\n";
  o << "output_dir = " << c.output_dir << "\n";

  o << "\n[grid]\n";
  o << "x_min = " << num(c.grid.x_min) << "\nx_max = " << num(c.grid.x_max) << "\n";
  o << "y_min = " << num(c.grid.y_min) << "\ny_max = " << num(c.grid.y_max) << "\n";
  o << "n = " << c.grid.n << "\n";

  o << "\n[ic]\n";
  if (const auto* s = std::get_if<Circle>(&c.ic.shape)) {
    o << "shape = circle\nradius = " << num(s->radius) << "\ncenter = " << num(s->cx) << ", "
      << num(s->cy) << "\n";
  } else if (const auto* s = std::get_if<TwoCircles>(&c.ic.shape)) {
    o << "shape = two_circles\nradius = " << num(s->radius) << "\ngap = " << num(s->gap) << "\n";
  } else if (const auto* s = std::get_if<Wedges>(&c.ic.shape)) {
    o << "shape = wedges\nM = " << num(s->M) << "\n";
  } else if (const auto* s = std::get_if<RandomField>(&c.ic.shape)) {
    o << "shape = random\nseed = " << s->seed << "\npresmooth_steps = " << s->presmooth_steps
      << "\npresmooth_k = " << num(s->presmooth_k) << "\npresmooth_eps = " << num(s->presmooth_eps)
      << "\n";
  } else if (const auto* s = std::get_if<Constant>(&c.ic.shape)) {
    o << "shape = constant\nvalue = " << num(s->value) << "\n";
  }
  if (const auto* t = std::get_if<TanhProfile>(&c.ic.profile))
    o << "profile = tanh\nprofile_eps = " << num(t->eps) << "\n";
  else
    o << "profile = signed_distance\n";

  if (c.method == MethodKind::Multilevel) {
    o << "\n[multilevel]\nlevels = ";
    for (std::size_t i = 0; i < c.schedule.levels.size(); ++i)
      o << (i ? ", " : "") << num(c.schedule.levels[i].h) << " " << num(c.schedule.levels[i].eps);
    o << "\nconvex_start = "
      << (c.convex_start == ConvexStart::Anchor
              ? "anchor"
              : c.convex_start == ConvexStart::Strict ? "strict" : "unchecked")
      << "\n";
  }
  return o.str();
}

}  // namespace mcflow
