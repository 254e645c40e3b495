#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dlnlp {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
};

// Numeric CSV with a header row; columns keyed by header name. Non-numeric
// cells (e.g. "nan") parse as NaN.
std::map<std::string, std::vector<double>> read_csv_columns(const std::filesystem::path& path);

// Renders line series to a standalone SVG. Points that are non-finite, or
// non-positive on a log axis, are skipped.
void write_line_plot_svg(const std::filesystem::path& path, const PlotSpec& spec,
                         const std::vector<PlotSeries>& series);

}  // namespace dlnlp
