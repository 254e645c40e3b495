#include "dlnlp/svg_plot.hpp"

#include "dlnlp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dlnlp {

std::map<std::string, std::vector<double>> read_csv_columns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, path.string() + ": empty CSV");
  std::vector<std::string> names;
  {
    std::istringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');) names.push_back(cell);
  }
  std::map<std::string, std::vector<double>> columns;
  for (const auto& name : names) columns[name];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t col = 0;
    for (std::string cell; std::getline(row, cell, ',') && col < names.size(); ++col) {
      char* end = nullptr;
      double value = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) value = std::numeric_limits<double>::quiet_NaN();
      columns[names[col]].push_back(value);
    }
  }
  return columns;
}

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double fraction(double v) const { return hi > lo ? (map(v) - lo) / (hi - lo) : 0.5; }
};

}  // namespace

void write_line_plot_svg(const std::filesystem::path& path, const PlotSpec& spec,
                         const std::vector<PlotSeries>& series) {
  Axis xa{spec.log_x}, ya{spec.log_y};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!xa.usable(s.x[i]) || !ya.usable(s.y[i])) continue;
      xmin = std::min(xmin, xa.map(s.x[i]));
      xmax = std::max(xmax, xa.map(s.x[i]));
      ymin = std::min(ymin, ya.map(s.y[i]));
      ymax = std::max(ymax, ya.map(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (spec.log_y) ymin = std::floor(ymin), ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;
  xa.lo = xmin, xa.hi = xmax, ya.lo = ymin, ya.hi = ymax;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + xa.fraction(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ya.fraction(v)) * ph; };

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                     kWidth, kHeight)
      << '\n';
  out << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", kWidth, kHeight) << '\n';
  out << fmt::format(R"(<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>)", kLeft + pw / 2,
                     escape(spec.title))
      << '\n';
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", kLeft, kTop, pw, ph)
      << '\n';

  // Ticks: five linear ticks, or one per decade on log axes.
  auto ticks = [](const Axis& a) {
    std::vector<double> t;
    if (a.log) {
      const double step = std::max(1.0, std::ceil((a.hi - a.lo) / 10.0));
      for (double e = std::ceil(a.lo); e <= a.hi + 1e-9; e += step) t.push_back(std::pow(10.0, e));
    } else {
      for (int i = 0; i <= 4; ++i) t.push_back(a.lo + (a.hi - a.lo) * i / 4.0);
    }
    return t;
  };
  for (double t : ticks(xa)) {
    const double x = px(t);
    out << fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="#ddd"/>)", x, kTop, kTop + ph) << '\n';
    out << fmt::format(R"(<text x="{:.2f}" y="{}" text-anchor="middle">{:.3g}</text>)", x, kTop + ph + 16, t) << '\n';
  }
  for (double t : ticks(ya)) {
    const double y = py(t);
    out << fmt::format(R"(<line x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}" stroke="#ddd"/>)", kLeft, y, kLeft + pw) << '\n';
    out << fmt::format(R"(<text x="{}" y="{:.2f}" text-anchor="end">{:.3g}</text>)", kLeft - 6, y + 4, t) << '\n';
  }
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", kLeft + pw / 2, kHeight - 16,
                     escape(spec.x_label))
      << '\n';
  out << fmt::format(R"svg(<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>)svg",
                     kTop + ph / 2, escape(spec.y_label))
      << '\n';

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kColors[s % kColors.size()];
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points=")", color);
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (!xa.usable(ser.x[i]) || !ya.usable(ser.y[i])) continue;
      out << fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
    }
    out << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    out << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", kLeft + pw + 10, ly,
                       kLeft + pw + 30, ly, color)
        << '\n';
    out << fmt::format(R"(<text x="{}" y="{}">{}</text>)", kLeft + pw + 36, ly + 4, escape(ser.label)) << '\n';
  }
  out << "</svg>\n";
}

}  // namespace dlnlp
