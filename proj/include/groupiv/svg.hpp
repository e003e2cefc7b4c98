#pragma once

// Small dependency-free SVG line/step plots for spectra, histograms and fits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "groupiv/spectrum.hpp"

namespace groupiv::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f4e9c";
  std::string label;
  bool steps = false;  // histogram style: x holds bin edges, y has one value per bin
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::string description;  // written into <desc>, e.g. the run manifest
  int width = 800;
  int height = 500;
};

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace detail {

inline double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

inline void write(std::ostream& out, const Plot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity();
  for (const auto& s : plot.series) {
    for (double v : s.x) {
      if (std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymax) || ymax <= ymin) ymax = ymin + 1.0;
  if (xmax <= xmin) xmax = xmin + 1.0;
  ymax += 0.05 * (ymax - ymin);

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
      << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n";
  if (!plot.description.empty()) out << "<desc>" << escape(plot.description) << "</desc>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << plot.width << "\" height=\"" << plot.height << "\" fill=\"white\"/>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!plot.title.empty()) {
    out << "<text x=\"" << plot.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(plot.title) << "</text>\n";
  }
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = detail::nice_step(xmax - xmin, 8);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    out << "<line x1=\"" << px(t) << "\" y1=\"" << top + ph << "\" x2=\"" << px(t) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>";
    out << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << detail::fmt(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  const double ys = detail::nice_step(ymax - ymin, 6);
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << left << "\" y2=\"" << py(t)
        << "\" stroke=\"black\"/>";
    out << "<text x=\"" << left - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">"
        << detail::fmt(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << plot.height - 15 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + ph / 2 << ")\">" << escape(plot.y_label) << "</text>\n";

  double legend_y = top + 16;
  for (const auto& s : plot.series) {
    out << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.5\" points=\"";
    if (s.steps) {
      for (std::size_t i = 0; i < s.y.size() && i + 1 < s.x.size(); ++i) {
        out << px(s.x[i]) << ',' << py(s.y[i]) << ' ' << px(s.x[i + 1]) << ',' << py(s.y[i]) << ' ';
      }
    } else {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (std::isfinite(s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
    }
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<line x1=\"" << left + pw - 150 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << left + pw - 130
          << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"2\"/>";
      out << "<text x=\"" << left + pw - 125 << "\" y=\"" << legend_y << "\">" << escape(s.label) << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</g>\n</svg>\n";
}

inline Series spectrum_series(const Spectrum& s, std::string label = "data") {
  return {s.offsets_ghz, s.counts, "#1f4e9c", std::move(label), false};
}

inline Series histogram_series(const HistogramData& h, std::string label = "counts") {
  return {h.bin_edges, std::vector<double>(h.counts.begin(), h.counts.end()), "#1f4e9c", std::move(label), true};
}

/// Samples `f` on `n` points across [lo, hi].
template <class F>
Series curve_series(F&& f, double lo, double hi, std::size_t n, std::string color, std::string label) {
  Series s{{}, {}, std::move(color), std::move(label), false};
  if (n < 2) n = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    s.x.push_back(x);
    s.y.push_back(f(x));
  }
  return s;
}

}  // namespace groupiv::svg
