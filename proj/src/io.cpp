#include "mcflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcflow/error.hpp"

namespace mcflow {

std::string format_scientific(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string render_csv(const CsvTable& table) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return s;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text(path, render_csv(table));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw Error(path.string() + " is empty");
  return t;
}

std::string render_pgm(const Field& u, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("render_pgm needs hi > lo");
  const GridSpec& g = u.grid();
  const int w = g.nodes_per_side();
  std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(w) + "\n255\n";
  s.reserve(s.size() + static_cast<std::size_t>(w) * w);
  for (int j = g.n; j >= 0; --j)
    for (int i = 0; i <= g.n; ++i) {
      const double t = std::clamp((u(i, j) - lo) / (hi - lo), 0.0, 1.0);
      s += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
  return s;
}

void write_pgm(const std::filesystem::path& path, const Field& u, double lo, double hi) {
  write_text(path, render_pgm(u, lo, hi));
}

void write_nodal_csv(const std::filesystem::path& path, const Field& u) {
  const GridSpec& g = u.grid();
  std::string s = "i,j,x,y,value\n";
  for (int j = 0; j <= g.n; ++j)
    for (int i = 0; i <= g.n; ++i) {
      s += std::to_string(i);
      s += ',';
      s += std::to_string(j);
      s += ',';
      s += format_scientific(g.x(i));
      s += ',';
      s += format_scientific(g.y(j));
      s += ',';
      s += format_scientific(u(i, j));
      s += '\n';
    }
  write_text(path, s);
}

namespace {

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, 255) {}

  void set(int x, int y, unsigned char v) {
    if (x >= 0 && x < w_ && y >= 0 && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = v;
  }

  void line(int x0, int y0, int x1, int y1, unsigned char v) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, v);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  std::string pgm() const {
    std::string s = "P5\n" + std::to_string(w_) + " " + std::to_string(h_) + "\n255\n";
    s.append(px_.begin(), px_.end());
    return s;
  }

 private:
  int w_, h_;
  std::vector<unsigned char> px_;
};

bool parse_cell(const std::string& s, double& v) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(v);
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series, int width, int height) {
  if (width < 32 || height < 32) throw InvalidArgument("plot canvas too small");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("series length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 >= x0)) throw InvalidArgument("nothing to plot");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const int margin = 16;
  Canvas c(width, height);
  const int l = margin, r = width - 1 - margin, t = margin, b = height - 1 - margin;
  c.line(l, t, r, t, 0);
  c.line(r, t, r, b, 0);
  c.line(r, b, l, b, 0);
  c.line(l, b, l, t, 0);
  auto px = [&](double x) { return l + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (r - l))); };
  auto py = [&](double y) { return b - static_cast<int>(std::lround((y - y0) / (y1 - y0) * (b - t))); };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto shade = static_cast<unsigned char>(series.size() > 1 ? 160 * k / (series.size() - 1) : 0);
    const auto& s = series[k];
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
      c.line(px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), shade);
    if (s.x.size() == 1) c.set(px(s.x[0]), py(s.y[0]), shade);
  }
  return c.pgm();
}

void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& out) {
  const CsvTable t = read_csv(csv);
  if (t.header.size() < 2) throw InvalidArgument(csv.string() + " needs at least two columns");
  std::size_t xcol = 0;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "time") xcol = c;
  std::vector<PlotSeries> series;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == xcol || t.header[c] == "step") continue;
    PlotSeries s{t.header[c], {}, {}};
    bool numeric = true;
    for (const auto& row : t.rows) {
      double x = 0, y = 0;
      if (row.size() <= std::max(c, xcol)) continue;
      if (!parse_cell(row[xcol], x)) continue;
      if (!parse_cell(row[c], y)) {
        if (!row[c].empty() && row[c] != "nan") numeric = false;
        continue;
      }
      s.x.push_back(x);
      s.y.push_back(y);
    }
    if (numeric && !s.x.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw InvalidArgument(csv.string() + " has no numeric columns to plot");
  write_text(out, render_line_plot(series));
}

}  // namespace mcflow
