/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace qecdecay::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Axes {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

struct SvgResult {
  std::string text;
  std::size_t dropped = 0; // points removed by a log axis (nonpositive)
};

namespace detail {

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

inline std::string escape(const std::string &s) {
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

} // namespace detail

/// Renders line series as a standalone SVG document, one <polyline> per
/// series. Output depends only on the inputs.
inline SvgResult emit_svg(const std::vector<Series> &series, const Axes &axes) {
  constexpr double width = 720.0, height = 480.0;
  constexpr double left = 80.0, right = 170.0, top = 40.0, bottom = 60.0;
  constexpr std::array<const char *, 8> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
      "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  if (series.empty())
    throw ValidationError("emit_svg: no series to plot");

  SvgResult res;
  std::vector<std::vector<std::pair<double, double>>> mapped(series.size());
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t s = 0; s < series.size(); ++s)
    for (auto [x, y] : series[s].points) {
      if ((axes.log_x && !(x > 0.0)) || (axes.log_y && !(y > 0.0)) ||
          !std::isfinite(x) || !std::isfinite(y)) {
        ++res.dropped;
        continue;
      }
      if (axes.log_x)
        x = std::log10(x);
      if (axes.log_y)
        y = std::log10(y);
      mapped[s].emplace_back(x, y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin))
    throw ValidationError("emit_svg: no plottable points");
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fixed(width) +
       "\" height=\"" + detail::fixed(height) + "\" viewBox=\"0 0 " +
       detail::fixed(width) + " " + detail::fixed(height) + "\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::fixed(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"15\">" + detail::escape(axes.title) + "</text>\n";
  o += "<rect x=\"" + detail::fixed(left) + "\" y=\"" + detail::fixed(top) + "\" width=\"" +
       detail::fixed(pw) + "\" height=\"" + detail::fixed(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  auto ticks = [](double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
      const double first = std::ceil(lo - 1e-9);
      const double step = std::max(1.0, std::ceil((std::floor(hi + 1e-9) - first) / 10.0));
      for (double d = first; d <= hi + 1e-9; d += step)
        t.push_back(d);
    }
    if (t.size() < 2) {
      t.clear();
      for (int i = 0; i <= 4; ++i)
        t.push_back(lo + (hi - lo) * i / 4.0);
    }
    return t;
  };
  for (double tx : ticks(xmin, xmax, axes.log_x)) {
    const double x = px(tx);
    o += "<line x1=\"" + detail::fixed(x) + "\" y1=\"" + detail::fixed(top + ph) +
         "\" x2=\"" + detail::fixed(x) + "\" y2=\"" + detail::fixed(top + ph + 5) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + detail::fixed(x) + "\" y=\"" + detail::fixed(top + ph + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::tick_label(axes.log_x ? std::pow(10.0, tx) : tx) + "</text>\n";
  }
  for (double ty : ticks(ymin, ymax, axes.log_y)) {
    const double y = py(ty);
    o += "<line x1=\"" + detail::fixed(left - 5) + "\" y1=\"" + detail::fixed(y) +
         "\" x2=\"" + detail::fixed(left) + "\" y2=\"" + detail::fixed(y) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + detail::fixed(left - 8) + "\" y=\"" + detail::fixed(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::tick_label(axes.log_y ? std::pow(10.0, ty) : ty) + "</text>\n";
  }
  o += "<text x=\"" + detail::fixed(left + pw / 2) + "\" y=\"" + detail::fixed(height - 15) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
       detail::escape(axes.x_label) + "</text>\n";
  o += "<text x=\"18\" y=\"" + detail::fixed(top + ph / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 18 " + detail::fixed(top + ph / 2) + ")\">" +
       detail::escape(axes.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char *color = palette[s % palette.size()];
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < mapped[s].size(); ++i)
      o += (i ? " " : "") + detail::fixed(px(mapped[s][i].first)) + "," +
           detail::fixed(py(mapped[s][i].second));
    o += "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(s);
    o += "<line x1=\"" + detail::fixed(left + pw + 12) + "\" y1=\"" + detail::fixed(ly) +
         "\" x2=\"" + detail::fixed(left + pw + 32) + "\" y2=\"" + detail::fixed(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + detail::fixed(left + pw + 36) + "\" y=\"" + detail::fixed(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::escape(series[s].label) + "</text>\n";
  }
  o += "</svg>\n";
  res.text = std::move(o);
  return res;
}

} // namespace qecdecay::cli
