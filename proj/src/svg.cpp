#include "dyadic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace dyadic {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string pow10_label(int e) {
  if (e == 0) return "1";
  if (e == 1) return "10";
  std::ostringstream os;
  os << "1e" << e;
  return os.str();
}

}  // namespace

void write_loglog_plot(std::ostream& out, const std::vector<SweepRow>& rows,
                       const SlopeFit* fit, const PlotOptions& opts) {
  std::vector<std::pair<double, double>> pts;  // log10 coordinates
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    if (!(r.a2 > 0.0) || !(r.norm > 0.0)) continue;
    if (!std::isfinite(r.a2) || !std::isfinite(r.norm)) continue;
    pts.emplace_back(std::log10(r.a2), std::log10(r.norm));
  }

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (!pts.empty()) {
    xmin = xmax = pts[0].first;
    ymin = ymax = pts[0].second;
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  const double xpad = std::max(0.05 * (xmax - xmin), 0.05);
  const double ypad = std::max(0.05 * (ymax - ymin), 0.05);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double ml = 70, mr = 20, mt = 45, mb = 55;
  const double pw = opts.width - ml - mr, ph = opts.height - mt - mb;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
      << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width
      << ' ' << opts.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << opts.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << opts.title << "</text>\n";

  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

  for (int e = static_cast<int>(std::ceil(xmin)); e <= std::floor(xmax); ++e) {
    const double px = sx(e);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << mt << "\" x2=\""
        << fmt(px) << "\" y2=\"" << mt + ph
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << pow10_label(e) << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ymin)); e <= std::floor(ymax); ++e) {
    const double py = sy(e);
    out << "<line x1=\"" << ml << "\" y1=\"" << fmt(py) << "\" x2=\""
        << ml + pw << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << pow10_label(e) << "</text>\n";
  }

  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opts.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << opts.x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << opts.y_label << "</text>\n";

  if (fit && !pts.empty()) {
    // Natural-log fit converted to the log10 frame keeps the same slope.
    const double b10 = fit->intercept / std::log(10.0);
    const double y0 = b10 + fit->slope * xmin;
    const double y1 = b10 + fit->slope * xmax;
    out << "<line x1=\"" << fmt(sx(xmin)) << "\" y1=\"" << fmt(sy(y0))
        << "\" x2=\"" << fmt(sx(xmax)) << "\" y2=\"" << fmt(sy(y1))
        << "\" stroke=\"#c0392b\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << opts.width - mr - 8 << "\" y=\"" << mt + 18
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"13\" fill=\"#c0392b\">slope "
        << fmt(fit->slope) << "</text>\n";
  }

  for (const auto& [x, y] : pts) {
    out << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
        << "\" r=\"4\" fill=\"#2e6da4\" fill-opacity=\"0.85\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace dyadic
