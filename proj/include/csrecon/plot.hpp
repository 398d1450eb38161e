#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "io.hpp"

namespace csrecon {

struct Rgb {
  unsigned char r = 0, g = 0, b = 0;
};

// Minimal RGB raster with Bresenham lines and a 5x7 bitmap font — enough to
// emit convergence plots without a display server or plotting library.
class Canvas {
public:
  Canvas(int w, int h, Rgb bg = {255, 255, 255}) : w_(w), h_(h), px_(size_t(w) * h * 3) {
    fill(bg);
  }

  int width() const { return w_; }
  int height() const { return h_; }
  const std::vector<unsigned char>& pixels() const { return px_; }

  void fill(Rgb c) {
    for (size_t l = 0; l + 2 < px_.size(); l += 3) {
      px_[l] = c.r;
      px_[l + 1] = c.g;
      px_[l + 2] = c.b;
    }
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const size_t l = (size_t(y) * w_ + x) * 3;
    px_[l] = c.r;
    px_[l + 1] = c.g;
    px_[l + 2] = c.b;
  }

  void line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void thick_line(int x0, int y0, int x1, int y1, Rgb c) {
    line(x0, y0, x1, y1, c);
    line(x0, y0 + 1, x1, y1 + 1, c);
  }

  void rect(int x0, int y0, int x1, int y1, Rgb c) {
    line(x0, y0, x1, y0, c);
    line(x1, y0, x1, y1, c);
    line(x1, y1, x0, y1, c);
    line(x0, y1, x0, y0, c);
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) set(x, y, c);
  }

  void text(int x, int y, const std::string& s, Rgb c) {
    for (char ch : s) {
      draw_glyph(x, y, ch, c);
      x += 6;
    }
  }

  static int text_width(const std::string& s) { return 6 * int(s.size()); }

private:
  void draw_glyph(int x, int y, char ch, Rgb c) {
    const auto& font = glyphs();
    char key = ch;
    if (key >= 'a' && key <= 'z') key = char(key - 'a' + 'A');
    auto it = font.find(key);
    if (it == font.end()) return;  // unknown characters render as gaps
    for (int col = 0; col < 5; ++col) {
      const std::uint8_t bits = it->second[size_t(col)];
      for (int row = 0; row < 7; ++row)
        if (bits & (1u << row)) set(x + col, y + row, c);
    }
  }

  static const std::map<char, std::array<std::uint8_t, 5>>& glyphs() {
    static const std::map<char, std::array<std::uint8_t, 5>> f = {
        {' ', {0x00, 0x00, 0x00, 0x00, 0x00}}, {'+', {0x08, 0x08, 0x3E, 0x08, 0x08}},
        {'-', {0x08, 0x08, 0x08, 0x08, 0x08}}, {'.', {0x00, 0x60, 0x60, 0x00, 0x00}},
        {'/', {0x20, 0x10, 0x08, 0x04, 0x02}}, {':', {0x00, 0x36, 0x36, 0x00, 0x00}},
        {'=', {0x14, 0x14, 0x14, 0x14, 0x14}}, {'_', {0x40, 0x40, 0x40, 0x40, 0x40}},
        {'%', {0x23, 0x13, 0x08, 0x64, 0x62}}, {'(', {0x00, 0x1C, 0x22, 0x41, 0x00}},
        {')', {0x00, 0x41, 0x22, 0x1C, 0x00}}, {',', {0x00, 0x50, 0x30, 0x00, 0x00}},
        {'0', {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {'1', {0x00, 0x42, 0x7F, 0x40, 0x00}},
        {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4B, 0x31}},
        {'4', {0x18, 0x14, 0x12, 0x7F, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
        {'6', {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
        {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1E}},
        {'A', {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {'B', {0x7F, 0x49, 0x49, 0x49, 0x36}},
        {'C', {0x3E, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7F, 0x41, 0x41, 0x22, 0x1C}},
        {'E', {0x7F, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7F, 0x09, 0x09, 0x09, 0x01}},
        {'G', {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {'H', {0x7F, 0x08, 0x08, 0x08, 0x7F}},
        {'I', {0x00, 0x41, 0x7F, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3F, 0x01}},
        {'K', {0x7F, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7F, 0x40, 0x40, 0x40, 0x40}},
        {'M', {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {'N', {0x7F, 0x04, 0x08, 0x10, 0x7F}},
        {'O', {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {'P', {0x7F, 0x09, 0x09, 0x09, 0x06}},
        {'Q', {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {'R', {0x7F, 0x09, 0x19, 0x29, 0x46}},
        {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7F, 0x01, 0x01}},
        {'U', {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {'V', {0x1F, 0x20, 0x40, 0x20, 0x1F}},
        {'W', {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
        {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
    };
    return f;
  }

  int w_, h_;
  std::vector<unsigned char> px_;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

namespace detail {

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline Rgb palette(size_t i) {
  static const Rgb colors[] = {{31, 119, 180}, {214, 39, 40},  {44, 160, 44},
                               {148, 103, 189}, {255, 127, 14}, {23, 190, 207}};
  return colors[i % (sizeof colors / sizeof colors[0])];
}

// One framed panel with ticks, optional log10 y axis, legend and polylines.
inline void draw_panel(Canvas& cv, int px0, int py0, int px1, int py1, const std::string& title,
                       const std::vector<PlotSeries>& series, bool log_y) {
  const Rgb black{0, 0, 0}, grey{210, 210, 210};
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      double yv = s.y[i];
      if (log_y) {
        if (!(yv > 0)) continue;
        yv = std::log10(yv);
      }
      if (!std::isfinite(yv)) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = yv;
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto sx = [&](double x) {
    return px0 + int(std::lround((x - xmin) / (xmax - xmin) * (px1 - px0)));
  };
  const auto sy = [&](double y) {
    return py1 - int(std::lround((y - ymin) / (ymax - ymin) * (py1 - py0)));
  };

  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4;
    const double yv = ymin + k * (ymax - ymin) / 4;
    cv.line(sx(xv), py0, sx(xv), py1, grey);
    cv.line(px0, sy(yv), px1, sy(yv), grey);
    const std::string xl = tick_label(xv);
    cv.text(sx(xv) - Canvas::text_width(xl) / 2, py1 + 4, xl, black);
    const std::string yl = tick_label(log_y ? std::pow(10.0, yv) : yv);
    cv.text(px0 - Canvas::text_width(yl) - 4, sy(yv) - 3, yl, black);
  }
  cv.rect(px0, py0, px1, py1, black);
  cv.text(px0 + 4, py0 - 10, title, black);

  int ly = py0 + 4;
  for (size_t si = 0; si < series.size(); ++si) {
    const Rgb c = palette(si);
    const auto& s = series[si];
    int prevx = 0, prevy = 0;
    bool have_prev = false;
    for (size_t i = 0; i < s.x.size(); ++i) {
      double yv = s.y[i];
      if (log_y) {
        if (!(yv > 0)) {
          have_prev = false;
          continue;
        }
        yv = std::log10(yv);
      }
      if (!std::isfinite(yv)) {
        have_prev = false;
        continue;
      }
      const int X = sx(s.x[i]), Y = sy(yv);
      if (have_prev) cv.thick_line(prevx, prevy, X, Y, c);
      prevx = X;
      prevy = Y;
      have_prev = true;
    }
    const int lx = px1 - 14 - Canvas::text_width(s.name) - 18;
    cv.fill_rect(lx, ly + 1, lx + 12, ly + 5, c);
    cv.text(lx + 18, ly, s.name, black);
    ly += 11;
  }
}

}  // namespace detail

// Two stacked panels: relative error on a log axis, structural similarity on
// a linear axis, one colored polyline per run.
inline Canvas render_convergence_plot(const std::vector<PlotSeries>& re_series,
                                      const std::vector<PlotSeries>& ssim_series) {
  const int W = 900, H = 640;
  Canvas cv(W, H);
  detail::draw_panel(cv, 70, 26, W - 20, H / 2 - 30, "RELATIVE ERROR", re_series, true);
  detail::draw_panel(cv, 70, H / 2 + 26, W - 20, H - 30, "SSIM", ssim_series, false);
  return cv;
}

inline void write_plot(const std::string& path, const Canvas& cv) {
  write_ppm(path, cv.width(), cv.height(), cv.pixels());
}

}  // namespace csrecon
