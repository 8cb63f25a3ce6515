#pragma once

// Test-side reference implementations, kept independent of the library code
// paths they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "svcmimo/frame.hpp"

namespace oracle {

// erfc via composite Simpson integration of the Gaussian in long double:
// erfc(x) = 1 - 2/sqrt(pi) * int_0^x exp(-t^2) dt. Absolute error well below
// 1e-13 for x in [0, 6] at this interval count.
inline long double erfc_quadrature(long double x) {
  constexpr int kIntervals = 4096;  // even
  const long double h = x / kIntervals;
  long double sum = std::exp(-x * x) + 1.0L;  // endpoints (exp(0) = 1)
  for (int i = 1; i < kIntervals; ++i) {
    const long double t = h * i;
    sum += std::exp(-t * t) * (i % 2 ? 4.0L : 2.0L);
  }
  const long double integral = sum * h / 3.0L;
  constexpr long double kTwoOverSqrtPi = 1.1283791670955125738961589031215L;
  return 1.0L - kTwoOverSqrtPi * integral;
}

// Plain per-pixel bilinear resize with half-pixel centers, written for
// clarity rather than speed.
inline std::vector<std::uint8_t> bilinear_plane(const std::vector<std::uint8_t>& src, int sw,
                                                int sh, int dw, int dh) {
  std::vector<std::uint8_t> dst(std::size_t(dw) * dh);
  for (int yd = 0; yd < dh; ++yd) {
    for (int xd = 0; xd < dw; ++xd) {
      double sy = (yd + 0.5) * double(sh) / dh - 0.5;
      double sx = (xd + 0.5) * double(sw) / dw - 0.5;
      if (sy < 0) sy = 0;
      if (sy > sh - 1) sy = sh - 1;
      if (sx < 0) sx = 0;
      if (sx > sw - 1) sx = sw - 1;
      const int y0 = int(sy), x0 = int(sx);
      const int y1 = y0 + 1 < sh ? y0 + 1 : sh - 1;
      const int x1 = x0 + 1 < sw ? x0 + 1 : sw - 1;
      const double fy = sy - y0, fx = sx - x0;
      const double v = (1 - fy) * ((1 - fx) * src[y0 * sw + x0] + fx * src[y0 * sw + x1]) +
                       fy * ((1 - fx) * src[y1 * sw + x0] + fx * src[y1 * sw + x1]);
      double r = v < 0 ? 0 : (v > 255 ? 255 : v);
      dst[std::size_t(yd) * dw + xd] = std::uint8_t(std::lround(r));
    }
  }
  return dst;
}

// Population standard deviation, plain two-pass arithmetic.
inline double pop_std(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  double acc = 0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / double(v.size()));
}

// Sobel gradient magnitudes over the interior of a luma plane.
inline std::vector<double> sobel_magnitudes(const std::vector<std::uint8_t>& y, int w, int h) {
  std::vector<double> mags;
  for (int r = 1; r + 1 < h; ++r) {
    for (int c = 1; c + 1 < w; ++c) {
      double gx = 0, gy = 0;
      const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
      const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          gx += kx[i][j] * y[(r - 1 + i) * w + (c - 1 + j)];
          gy += ky[i][j] * y[(r - 1 + i) * w + (c - 1 + j)];
        }
      mags.push_back(std::sqrt(gx * gx + gy * gy));
    }
  }
  return mags;
}

// Deterministic little test-pattern frame (not the library generator).
inline svcmimo::Frame pattern_frame(int w, int h, unsigned salt) {
  svcmimo::Frame f = svcmimo::Frame::solid(w, h, 0, 128);
  unsigned state = salt * 2654435761u + 12345u;
  for (auto& px : f.y) {
    state = state * 1664525u + 1013904223u;
    px = std::uint8_t((state >> 24) & 0xFF);
  }
  return f;
}

}  // namespace oracle
