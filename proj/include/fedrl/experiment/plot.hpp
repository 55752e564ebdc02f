#pragma once

// Minimal SVG line charts for reward curves, plus the tidy CSV behind them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedrl/experiment/report.hpp"
#include "fedrl/metrics.hpp"

namespace fedrl::experiment {

struct NamedSeries {
  std::string label;
  Series data;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<NamedSeries> series;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
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

// Round step of roughly n ticks: 1, 2 or 5 times a power of ten.
inline double nice_step(double span, int n) {
  if (!(span > 0)) return 1.0;
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r <= 1 ? 1 : r <= 2 ? 2 : r <= 5 ? 5 : 10) * mag;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

inline std::string render_svg(const Chart& chart) {
  std::size_t points = 0;
  for (const auto& s : chart.series) points += s.data.size();
  if (points == 0) throw std::invalid_argument("render_svg: chart has no data");

  double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = -1e300;
  bool integral_x = true;
  for (const auto& s : chart.series)
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      integral_x = integral_x && s.data.x[i] == std::floor(s.data.x[i]);
      x0 = std::min(x0, s.data.x[i]);
      x1 = std::max(x1, s.data.x[i]);
      y0 = std::min(y0, s.data.y[i]);
      y1 = std::max(y1, s.data.y[i]);
    }
  if (x1 <= x0) {
    x0 -= 1;
    x1 += 1;
  }
  if (y1 <= y0) y1 = y0 + 1;
  const double ystep = detail::nice_step(y1 - y0, 5);
  y1 = std::ceil(y1 / ystep) * ystep;
  y0 = std::floor(y0 / ystep) * ystep;
  double xstep = detail::nice_step(x1 - x0, 8);
  if (integral_x) xstep = std::max(xstep, 1.0);

  constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << detail::xml_escape(chart.title) << "</text>\n";

  // grid and ticks
  for (double y = y0; y <= y1 + ystep * 1e-9; y += ystep) {
    const auto yy = detail::fmt("%.2f", py(y));
    o << "<line x1=\"" << L << "\" y1=\"" << yy << "\" x2=\"" << L + pw << "\" y2=\"" << yy
      << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << yy << "\" text-anchor=\"end\" dy=\"4\">"
      << detail::fmt("%g", y) << "</text>\n";
  }
  for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + xstep * 1e-9; x += xstep) {
    const auto xx = detail::fmt("%.2f", px(x));
    o << "<line x1=\"" << xx << "\" y1=\"" << T + ph << "\" x2=\"" << xx << "\" y2=\""
      << T + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << xx << "\" y=\"" << T + ph + 19 << "\" text-anchor=\"middle\">"
      << detail::fmt("%g", x) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(chart.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::xml_escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = detail::kPalette[k % std::size(detail::kPalette)];
    if (!s.data.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
      for (std::size_t i = 0; i < s.data.size(); ++i)
        o << (i ? " " : "") << detail::fmt("%.2f", px(s.data.x[i])) << ','
          << detail::fmt("%.2f", py(s.data.y[i]));
      o << "\"/>\n";
      if (s.data.size() == 1)
        o << "<circle cx=\"" << detail::fmt("%.2f", px(s.data.x[0])) << "\" cy=\""
          << detail::fmt("%.2f", py(s.data.y[0])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = T + 12 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 34 << "\" y2=\""
      << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 40 << "\" y=\"" << ly + 4 << "\">" << detail::xml_escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

struct MetricsInput {
  std::string label;  // legend prefix
  std::vector<RoundRecord> rows;
};

struct PlotSet {
  Chart validation;  // eval reward by round, one line per (input, model)
  Chart training;    // mean training reward by cumulative local epoch
};

inline PlotSet build_plots(const std::vector<MetricsInput>& inputs) {
  PlotSet p;
  p.validation = {"Validation reward", "round", "cumulative reward", {}};
  p.training = {"Training reward", "cumulative local epochs", "cumulative reward", {}};
  for (const auto& in : inputs) {
    for (const char* model : {"global", "center"}) {
      Series s = eval_series(in.rows, model);
      if (!s.empty()) p.validation.series.push_back({in.label + " " + model, std::move(s)});
    }
    for (const char* model : {"client", "center"}) {
      Series s = train_series(in.rows, model);
      if (!s.empty()) p.training.series.push_back({in.label + " " + model, std::move(s)});
    }
  }
  return p;
}

inline std::string tidy_csv(const PlotSet& p) {
  std::ostringstream o;
  o << "figure,series,x,y\n";
  for (const auto* c : {&p.validation, &p.training}) {
    const char* fig = c == &p.validation ? "validation" : "training";
    for (const auto& s : c->series)
      for (std::size_t i = 0; i < s.data.size(); ++i)
        o << fig << ',' << s.label << ',' << format_real(s.data.x[i]) << ','
          << format_real(s.data.y[i]) << '\n';
  }
  return o.str();
}

// Writes validation.svg, training.svg and plot_data.csv into `out_dir`.
// Nothing is written unless every input has at least one round.
inline std::vector<std::filesystem::path> emit_plots(const std::vector<MetricsInput>& inputs,
                                                     const std::filesystem::path& out_dir) {
  if (inputs.empty()) throw std::invalid_argument("emit_plots: no metrics given");
  for (const auto& in : inputs)
    if (in.rows.empty()) throw std::invalid_argument("emit_plots: metrics '" + in.label + "' has no rounds");
  const PlotSet p = build_plots(inputs);

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (!p.validation.series.empty()) files.emplace_back(out_dir / "validation.svg", render_svg(p.validation));
  if (!p.training.series.empty()) files.emplace_back(out_dir / "training.svg", render_svg(p.training));
  if (files.empty()) throw std::invalid_argument("emit_plots: metrics contain no plottable rows");
  files.emplace_back(out_dir / "plot_data.csv", tidy_csv(p));

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, body] : files) {
    std::ofstream os(path, std::ios::binary);
    if (!os || !(os << body)) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace fedrl::experiment
