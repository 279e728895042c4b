#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcflow/grid.hpp"

namespace mcflow {

/// Scientific notation with 17 significant digits and a lowercase e,
/// independent of the global locale.
std::string format_scientific(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws Error when the file cannot be written.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string render_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses a CSV produced by render_csv (no quoting). Throws Error.
CsvTable read_csv(const std::filesystem::path& path);

/// Binary 8-bit PGM; value v maps to round(255 (v - lo) / (hi - lo)),
/// clamped. Row 0 of the image is the top of the domain (largest y).
std::string render_pgm(const Field& u, double lo = -1.0, double hi = 1.0);
void write_pgm(const std::filesystem::path& path, const Field& u, double lo = -1.0,
               double hi = 1.0);

/// One row per node: i, j, x, y, value.
void write_nodal_csv(const std::filesystem::path& path, const Field& u);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot on a white canvas with a black frame; each series gets its own
/// gray level. Returns a binary PGM. Throws InvalidArgument on empty input.
std::string render_line_plot(const std::vector<PlotSeries>& series, int width = 640,
                             int height = 480);

/// Reads a CSV, plots every numeric column against the first one (or
/// against "time" when present) and writes a PGM to `out`.
void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& out);

}  // namespace mcflow
