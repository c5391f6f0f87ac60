#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "../error.hpp"
#include "table.hpp"

namespace susyq::io {

struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;  // columns
  std::vector<double> y;  // rows
  /// z[row][col]; NaN cells are drawn gray.
  std::vector<std::vector<double>> z;
};

struct LineFamily {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<std::vector<double>> curves;
  /// Drawn dashed on top of the curves.
  std::vector<std::vector<double>> references;
  std::vector<std::string> curve_labels;
};

namespace detail {

constexpr double kWidth = 640, kHeight = 440, kLeft = 70, kRight = 90, kTop = 40, kBottom = 55;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Perceptually ordered dark-blue → teal → yellow ramp.
inline std::string color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  if (!std::isfinite(t)) return "#999999";
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  double f = t - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double sx(double v) const { return kLeft + (v - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double sy(double v) const { return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

inline std::string open(const std::string& title, const std::string& dataset_hash) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
                  "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<metadata>dataset-sha256:" + dataset_hash + "</metadata>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + px(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  return s;
}

inline std::string axes(const Frame& f, const std::string& xl, const std::string& yl) {
  std::string s;
  double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;
  s += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(right - left) + "\" height=\"" +
       px(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double vx = f.x0 + (f.x1 - f.x0) * i / 4.0, vy = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<line x1=\"" + px(f.sx(vx)) + "\" y1=\"" + px(bottom) + "\" x2=\"" + px(f.sx(vx)) + "\" y2=\"" +
         px(bottom + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + px(f.sx(vx)) + "\" y=\"" + px(bottom + 18) + "\" text-anchor=\"middle\">" + num(vx) + "</text>\n";
    s += "<line x1=\"" + px(left - 5) + "\" y1=\"" + px(f.sy(vy)) + "\" x2=\"" + px(left) + "\" y2=\"" + px(f.sy(vy)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + px(left - 8) + "\" y=\"" + px(f.sy(vy) + 4) + "\" text-anchor=\"end\">" + num(vy) + "</text>\n";
  }
  s += "<text x=\"" + px((left + right) / 2) + "\" y=\"" + px(kHeight - 12) + "\" text-anchor=\"middle\">" + escape(xl) +
       "</text>\n";
  s += "<text transform=\"translate(16," + px((top + bottom) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(yl) + "</text>\n";
  return s;
}

inline std::pair<double, double> finite_range(const std::vector<std::vector<double>>& rows) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows)
    for (double v : r)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi == lo) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

// Cell edges halfway between sample points.
inline std::vector<double> edges(const std::vector<double>& c) {
  std::vector<double> e(c.size() + 1);
  if (c.size() == 1) return {c[0] - 0.5, c[0] + 0.5};
  for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
  e.front() = c.front() - (e[1] - c.front());
  e.back() = c.back() + (c.back() - e[c.size() - 1]);
  return e;
}

}  // namespace detail

inline std::string render_svg(const Heatmap& h, const std::string& dataset_hash) {
  if (h.x.empty() || h.y.empty() || h.z.size() != h.y.size()) throw Error("svg: empty or malformed heatmap dataset");
  for (const auto& row : h.z)
    if (row.size() != h.x.size()) throw Error("svg: heatmap row width mismatch");
  auto ex = detail::edges(h.x), ey = detail::edges(h.y);
  detail::Frame f{ex.front(), ex.back(), ey.front(), ey.back()};
  auto [lo, hi] = detail::finite_range(h.z);
  std::string s = detail::open(h.title, dataset_hash);
  for (std::size_t r = 0; r < h.y.size(); ++r)
    for (std::size_t c = 0; c < h.x.size(); ++c) {
      double x0 = f.sx(ex[c]), x1 = f.sx(ex[c + 1]), y0 = f.sy(ey[r + 1]), y1 = f.sy(ey[r]);
      s += "<rect x=\"" + detail::px(x0) + "\" y=\"" + detail::px(y0) + "\" width=\"" + detail::px(x1 - x0 + 0.3) +
           "\" height=\"" + detail::px(y1 - y0 + 0.3) + "\" fill=\"" + detail::color((h.z[r][c] - lo) / (hi - lo)) +
           "\"/>\n";
    }
  s += detail::axes(f, h.x_label, h.y_label);
  // Color bar.
  double bx = detail::kWidth - detail::kRight + 20, top = detail::kTop, bottom = detail::kHeight - detail::kBottom;
  for (int i = 0; i < 50; ++i) {
    double y0 = bottom - (bottom - top) * (i + 1) / 50.0;
    s += "<rect x=\"" + detail::px(bx) + "\" y=\"" + detail::px(y0) + "\" width=\"14\" height=\"" +
         detail::px((bottom - top) / 50.0 + 0.3) + "\" fill=\"" + detail::color((i + 0.5) / 50.0) + "\"/>\n";
  }
  s += "<text x=\"" + detail::px(bx + 18) + "\" y=\"" + detail::px(top + 8) + "\">" + detail::num(hi) + "</text>\n";
  s += "<text x=\"" + detail::px(bx + 18) + "\" y=\"" + detail::px(bottom) + "\">" + detail::num(lo) + "</text>\n";
  return s + "</svg>\n";
}

inline std::string render_svg(const LineFamily& l, const std::string& dataset_hash) {
  if (l.x.empty() || (l.curves.empty() && l.references.empty())) throw Error("svg: empty line dataset");
  std::vector<std::vector<double>> all = l.curves;
  all.insert(all.end(), l.references.begin(), l.references.end());
  for (const auto& c : all)
    if (c.size() != l.x.size()) throw Error("svg: curve length mismatch");
  auto [lo, hi] = detail::finite_range(all);
  double pad = 0.04 * (hi - lo);
  double xlo = *std::min_element(l.x.begin(), l.x.end()), xhi = *std::max_element(l.x.begin(), l.x.end());
  if (xhi == xlo) xhi = xlo + 1.0;
  detail::Frame f{xlo, xhi, lo - pad, hi + pad};
  std::string s = detail::open(l.title, dataset_hash);
  auto path = [&](const std::vector<double>& y) {
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + detail::px(f.sx(l.x[i])) + " " + detail::px(f.sy(y[i]));
      pen = true;
    }
    return d;
  };
  for (std::size_t i = 0; i < l.curves.size(); ++i) {
    s += "<path d=\"" + path(l.curves[i]) + "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.2\"";
    if (i < l.curve_labels.size()) s += "><title>" + detail::escape(l.curve_labels[i]) + "</title></path>\n";
    else s += "/>\n";
  }
  for (const auto& r : l.references)
    s += "<path d=\"" + path(r) + "\" fill=\"none\" stroke=\"#1f4fd1\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n";
  s += detail::axes(f, l.x_label, l.y_label);
  return s + "</svg>\n";
}

}  // namespace susyq::io
