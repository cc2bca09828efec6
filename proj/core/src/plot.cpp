#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"
#include "slowbond/harness.hpp"

namespace slowbond {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_error_plot_svg(std::ostream& out, const ConvergenceTable& table) {
  // series: macro time -> (n, worst error)
  std::map<double, std::vector<std::pair<double, double>>> series;
  for (const auto& e : worst_errors(table)) {
    if (e.n == 0 || !(e.error > 0.0)) continue;
    series[e.macro_time].emplace_back(static_cast<double>(e.n), e.error);
  }
  if (series.empty()) throw UsageError("plot: no positive errors to draw");

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& [t, pts] : series)
    for (const auto& [x, y] : pts) {
      x_lo = std::min(x_lo, std::log10(x));
      x_hi = std::max(x_hi, std::log10(x));
      y_lo = std::min(y_lo, std::log10(y));
      y_hi = std::max(y_hi, std::log10(y));
    }
  x_lo = std::floor(x_lo * 10.0) / 10.0 - 0.1;
  x_hi = std::ceil(x_hi * 10.0) / 10.0 + 0.1;
  y_lo = std::floor(y_lo);
  y_hi = std::ceil(y_hi);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  auto px = [&](double lx) { return kMargin + (lx - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); };
  auto py = [&](double ly) {
    return kHeight - kMargin - (ly - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  for (double d = y_lo; d <= y_hi + 1e-9; d += 1.0)
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << py(d) + 4
        << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  for (const auto& [t, pts] : series)
    for (const auto& [x, y] : pts)
      out << "<text x=\"" << px(std::log10(x)) << "\" y=\"" << kHeight - kMargin + 16
          << "\" text-anchor=\"middle\">" << x << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">n (log scale)</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\" text-anchor=\"middle\">max abs error (log scale)</text>\n";

  std::size_t s = 0;
  for (auto& [t, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = kColors[s % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) out << px(std::log10(x)) << ',' << py(std::log10(y)) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts)
      out << "<circle cx=\"" << px(std::log10(x)) << "\" cy=\"" << py(std::log10(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << kMargin + 16.0 * s
        << "\" text-anchor=\"end\" fill=\"" << color << "\">t = " << format_double(t)
        << "</text>\n";
    ++s;
  }
  out << "</svg>\n";
}

}  // namespace slowbond
