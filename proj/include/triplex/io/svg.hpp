#pragma once

// Minimal self-contained SVG line plots (no scripts, fonts or external assets).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "triplex/errors.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/evolution/loss.hpp"
#include "triplex/io/csv.hpp"

namespace triplex {

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool markers = false;
  bool line = true;
};

struct Plot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
  std::vector<std::string> notes;  // printed in the upper left of the frame
  int width = 640, height = 420;
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
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

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

}  // namespace detail

/// Renders the plot. Points that are non-finite, or nonpositive on a log
/// axis, are skipped; a plot without any drawable point is an error.
inline std::string render_svg(const Plot& p) {
  if (p.series.empty()) throw InvalidArgument("plot has no series");
  auto tx = [&](double v) { return p.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return p.logy ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!p.logx || x > 0.0) && (!p.logy || y > 0.0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : p.series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("series '" + s.name + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw InvalidArgument("plot has no drawable data");
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    const double d = std::max(0.5, 0.1 * std::abs(y0));
    y0 -= d;
    y1 += d;
  }
  const double pad_y = 0.05 * (y1 - y0);
  y0 -= pad_y;
  y1 += pad_y;

  const double L = 70, R = 20, Tm = 40, B = 50;
  const double W = p.width - L - R, H = p.height - Tm - B;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * W; };
  auto py = [&](double v) { return Tm + H - (ty(v) - y0) / (y1 - y0) * H; };
  using detail::fixed;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.width) + "\" height=\"" +
       std::to_string(p.height) + "\" viewBox=\"0 0 " + std::to_string(p.width) + " " + std::to_string(p.height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + fixed(L) + "\" y=\"" + fixed(Tm) + "\" width=\"" + fixed(W) + "\" height=\"" + fixed(H) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = L + W * i / 4.0, gy = Tm + H - H * i / 4.0;
    const double vx = p.logx ? std::pow(10.0, fx) : fx, vy = p.logy ? std::pow(10.0, fy) : fy;
    s += "<line x1=\"" + fixed(gx) + "\" y1=\"" + fixed(Tm + H) + "\" x2=\"" + fixed(gx) + "\" y2=\"" +
         fixed(Tm + H + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(gx) + "\" y=\"" + fixed(Tm + H + 18) + "\" text-anchor=\"middle\">" +
         detail::tick_label(vx) + "</text>\n";
    s += "<line x1=\"" + fixed(L - 5) + "\" y1=\"" + fixed(gy) + "\" x2=\"" + fixed(L) + "\" y2=\"" + fixed(gy) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(L - 8) + "\" y=\"" + fixed(gy + 4) + "\" text-anchor=\"end\">" + detail::tick_label(vy) +
         "</text>\n";
  }
  s += "<text x=\"" + fixed(L + W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::escape_xml(p.title) + "</text>\n";
  s += "<text x=\"" + fixed(L + W / 2) + "\" y=\"" + fixed(p.height - 12.0) + "\" text-anchor=\"middle\">" +
       detail::escape_xml(p.xlabel) + (p.logx ? " (log)" : "") + "</text>\n";
  s += "<text x=\"16\" y=\"" + fixed(Tm + H / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fixed(Tm + H / 2) + ")\">" + detail::escape_xml(p.ylabel) + (p.logy ? " (log)" : "") + "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& ser = p.series[k];
    const char* color = detail::palette(k);
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!usable(ser.x[i], ser.y[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fixed(px(ser.x[i])) + "," + fixed(py(ser.y[i]));
    }
    if (ser.line && !pts.empty())
      s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    if (ser.markers)
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        if (usable(ser.x[i], ser.y[i]))
          s += "<circle cx=\"" + fixed(px(ser.x[i])) + "\" cy=\"" + fixed(py(ser.y[i])) + "\" r=\"3\" fill=\"" +
               color + "\"/>\n";
    s += "<text x=\"" + fixed(L + W - 8) + "\" y=\"" + fixed(Tm + 16 + 14.0 * k) + "\" text-anchor=\"end\" fill=\"" +
         color + "\">" + detail::escape_xml(ser.name) + "</text>\n";
  }
  for (std::size_t k = 0; k < p.notes.size(); ++k)
    s += "<text x=\"" + fixed(L + 8) + "\" y=\"" + fixed(Tm + 16 + 14.0 * k) + "\">" + detail::escape_xml(p.notes[k]) +
         "</text>\n";
  s += "</svg>\n";
  return s;
}

inline void write_svg(const std::string& path, const Plot& p) { write_text_file(path, render_svg(p)); }

/// Weighted energy against time.
inline Plot energy_plot(const EnergyTrace& tr, const std::string& title = "weighted energy") {
  if (tr.size() == 0) throw InvalidArgument("energy trace is empty");
  Plot p;
  p.title = title;
  p.xlabel = "t";
  p.ylabel = "E(t)";
  p.logy = std::all_of(tr.E.begin(), tr.E.end(), [](double v) { return v > 0.0; });
  p.series.push_back({"E", tr.t, tr.E});
  return p;
}

/// Gain against <k> on log-log axes, with the fitted line and its slope.
inline Plot loss_plot(const LossResult& r, const std::string& title = "derivative loss") {
  if (r.k.empty() || r.gain.size() != r.k.size()) throw InvalidArgument("loss result has no data");
  Plot p;
  p.title = title;
  p.xlabel = "<k>";
  p.ylabel = "gain";
  p.logx = p.logy = true;
  Series data{"measured", {}, r.gain, true, false};
  for (int k : r.k) data.x.push_back(japanese_bracket(static_cast<double>(k)));
  p.series.push_back(data);
  if (std::isfinite(r.exponent)) {
    Series fit{"fit", data.x, {}};
    for (double x : data.x) fit.y.push_back(std::exp(r.intercept + r.exponent * std::log(x)));
    p.series.push_back(fit);
    p.notes.push_back("slope = " + detail::fixed(r.exponent, 3));
  } else {
    p.notes.push_back("verdict: " + r.verdict);
  }
  return p;
}

}  // namespace triplex
