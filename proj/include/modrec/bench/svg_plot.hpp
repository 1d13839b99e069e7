#pragma once

// Static SVG line chart of mean NMSE (dB) against the sweep variable.

#include "modrec/bench/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace modrec::bench {

struct PlotOptions {
  std::string title;
  int width = 720;
  int height = 480;
};

namespace svg_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* color_for(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return palette[i % 4];
}

}  // namespace svg_detail

/// One polyline per method (only when it has two or more points), a marker
/// at every point, legend and axis labels. -inf dB (exact recovery in every
/// trial) is drawn on a floor 10 dB below the lowest finite value.
/// Noiseless points (sweep value +inf) have no place on a linear axis and are
/// left out.
inline std::string render_plot(const std::vector<SummaryRow>& summary, const PlotOptions& opt = {}) {
  using namespace svg_detail;
  std::vector<SummaryRow> rows;
  std::copy_if(summary.begin(), summary.end(), std::back_inserter(rows),
               [](const SummaryRow& r) { return std::isfinite(r.sweep_value); });
  detail::require(!rows.empty(), "emit_plot: no finite sweep values to plot");
  const SweepVariable variable = rows.front().sweep_var;
  for (const auto& r : rows) {
    detail::require(r.sweep_var == variable, "emit_plot: summary mixes sweep variables");
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& r : rows) {
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    if (std::isfinite(r.mean_nmse_db)) {
      ymin = std::min(ymin, r.mean_nmse_db);
      ymax = std::max(ymax, r.mean_nmse_db);
    }
  }
  const double floor_db = std::isfinite(ymin) ? ymin - 10.0 : -100.0;
  bool clamped = false;
  for (const auto& r : rows) clamped = clamped || !std::isfinite(r.mean_nmse_db);
  if (clamped) ymin = floor_db;
  if (!std::isfinite(ymax)) ymax = floor_db;
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double left = 80, right = 170, top = 50, bottom = 60;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) {
    const double v = std::isfinite(y) ? y : floor_db;
    return top + (ymax - v) / (ymax - ymin) * ph;
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(opt.title) << "</text>\n";
  }

  // Axes, grid and ticks.
  s << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
    << fmt(top + ph) << "\"/>\n";
  s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(top + ph)
    << "\"/>\n";
  s << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / ticks;
    const double yv = ymin + (ymax - ymin) * i / ticks;
    s << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(std::round(xv * 100) / 100) << "</text>\n";
    s << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(yv)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
      << fmt(sy(yv)) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">"
      << tick_label(std::round(yv * 10) / 10) << "</text>\n";
  }
  s << "</g>\n";
  const std::string xlabel = variable == SweepVariable::snr ? "SNR (dB)" : "oversampling factor";
  s << "<text class=\"xlabel\" x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(opt.height - 15.0)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  s << "<text class=\"ylabel\" x=\"20\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
    << " transform=\"rotate(-90 20 " << fmt(top + ph / 2) << ")\">mean NMSE (dB)</text>\n";

  // Series.
  std::vector<Method> methods;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    auto pts = rows_for(rows, methods[m]);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.sweep_value < b.sweep_value; });
    const std::string name = to_string(methods[m]);
    s << "<g class=\"series\" data-method=\"" << name << "\">\n";
    if (pts.size() >= 2) {
      s << "<polyline fill=\"none\" stroke=\"" << color_for(m) << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        s << (i ? " " : "") << fmt(sx(pts[i].sweep_value)) << ',' << fmt(sy(pts[i].mean_nmse_db));
      }
      s << "\"/>\n";
    }
    for (const auto& p : pts) {
      s << "<circle cx=\"" << fmt(sx(p.sweep_value)) << "\" cy=\"" << fmt(sy(p.mean_nmse_db)) << "\" r=\"3.5\" fill=\""
        << color_for(m) << "\"/>\n";
    }
    s << "</g>\n";

    const double ly = top + 10 + 22.0 * static_cast<double>(m);
    const double lx = left + pw + 20;
    s << "<g class=\"legend\"><line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color_for(m) << "\" stroke-width=\"2\"/><text x=\""
      << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">" << escape(name) << "</text></g>\n";
  }
  if (clamped) {
    s << "<text x=\"" << fmt(left + pw + 20) << "\" y=\"" << fmt(top + ph) << "\" font-size=\"10\">"
      << "floor: exact recovery</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void emit_plot(const std::vector<SummaryRow>& rows, const std::string& path, const PlotOptions& opt = {}) {
  const std::string svg = render_plot(rows, opt);
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open '" + path + "' for writing");
  out << svg;
  out.flush();
  if (!out) throw NumericalError("write failed for '" + path + "'");
}

}  // namespace modrec::bench
