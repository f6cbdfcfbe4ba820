#include "ophydro/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ophydro/errors.hpp"

namespace ophydro {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log_scale) {
  char buf[40];
  if (log_scale) {
    std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(v)));
  } else if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) {
    std::snprintf(buf, sizeof(buf), "%.1e", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%g", v);
  }
  return buf;
}

// tick positions in transformed coordinates
std::vector<double> make_ticks(double lo, double hi, bool log_scale) {
  std::vector<double> ticks;
  if (log_scale) {
    for (int e = static_cast<int>(std::ceil(lo - 1e-9));
         e <= static_cast<int>(std::floor(hi + 1e-9)); ++e)
      ticks.push_back(e);
    if (ticks.size() > 12) {
      std::vector<double> thin;
      const int stride = static_cast<int>((ticks.size() + 11) / 12);
      for (std::size_t i = 0; i < ticks.size(); i += stride) thin.push_back(ticks[i]);
      ticks.swap(thin);
    }
    return ticks;
  }
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  if (raw / mag > 5.0)
    step = 10.0 * mag;
  else if (raw / mag > 2.0)
    step = 5.0 * mag;
  else if (raw / mag > 1.0)
    step = 2.0 * mag;
  const double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 0.5 * step; v += step) ticks.push_back(v);
  return ticks;
}

}  // namespace

std::string render_svg(const SvgChart& chart) {
  if (chart.series.empty()) throw validation_error("render_svg: no series");

  const auto fx = [&](double v) { return chart.log_x ? std::log10(v) : v; };
  const auto fy = [&](double v) { return chart.log_y ? std::log10(v) : v; };
  const auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (chart.log_x && x <= 0.0) return false;
    if (chart.log_y && y <= 0.0) return false;
    return true;
  };

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size())
      throw validation_error("render_svg: series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xlo = std::min(xlo, fx(s.x[i]));
      xhi = std::max(xhi, fx(s.x[i]));
      ylo = std::min(ylo, fy(s.y[i]));
      yhi = std::max(yhi, fy(s.y[i]));
    }
  }
  if (!(xlo <= xhi && ylo <= yhi))
    throw validation_error("render_svg: no plottable points");
  if (xhi == xlo) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi == ylo) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  const double ypad = 0.04 * (yhi - ylo);
  ylo -= ypad;
  yhi += ypad;

  const double ml = 74, mr = 22, mt = 42, mb = 58;
  const double pw = chart.width - ml - mr, ph = chart.height - mt - mb;
  const auto tx = [&](double v) { return ml + (fx(v) - xlo) / (xhi - xlo) * pw; };
  const auto ty = [&](double v) { return mt + ph - (fy(v) - ylo) / (yhi - ylo) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" viewBox=\"0 0 " << chart.width << ' '
      << chart.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << chart.title << "</text>\n";

  // gridlines and tick labels in transformed coordinates
  for (double t : make_ticks(xlo, xhi, chart.log_x)) {
    const double gx = ml + (t - xlo) / (xhi - xlo) * pw;
    out << "<line x1=\"" << px(gx) << "\" y1=\"" << px(mt) << "\" x2=\"" << px(gx)
        << "\" y2=\"" << px(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px(gx) << "\" y=\"" << px(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, chart.log_x) << "</text>\n";
  }
  for (double t : make_ticks(ylo, yhi, chart.log_y)) {
    const double gy = mt + ph - (t - ylo) / (yhi - ylo) * ph;
    out << "<line x1=\"" << px(ml) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(ml + pw)
        << "\" y2=\"" << px(gy) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px(ml - 6) << "\" y=\"" << px(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, chart.log_y) << "</text>\n";
  }
  out << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(pw)
      << "\" height=\"" << px(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << px(ml + pw / 2) << "\" y=\"" << px(chart.height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << chart.x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << px(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 "
      << px(mt + ph / 2) << ")\">" << chart.y_label << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const std::string color =
        s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))]
                        : s.color;
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        out << "<circle cx=\"" << px(tx(s.x[i])) << "\" cy=\"" << px(ty(s.y[i]))
            << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
      if (s.dashed) out << " stroke-dasharray=\"7,5\"";
      out << " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        if (!first) out << ' ';
        out << px(tx(s.x[i])) << ',' << px(ty(s.y[i]));
        first = false;
      }
      out << "\"/>\n";
    }
    // legend entry
    const double ly = mt + 14 + 17 * static_cast<double>(si);
    const double lx = ml + pw - 170;
    if (s.points)
      out << "<circle cx=\"" << px(lx + 11) << "\" cy=\"" << px(ly - 4)
          << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
    else
      out << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
          << px(lx + 22) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"1.6\""
          << (s.dashed ? " stroke-dasharray=\"7,5\"" : "") << "/>\n";
    out << "<text x=\"" << px(lx + 28) << "\" y=\"" << px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ophydro
