#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "avdiar/errors.hpp"

namespace avdiar {

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g,
                        std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.data.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < img.data.size(); i += 3) {
      img.data[i] = r;
      img.data[i + 1] = g;
      img.data[i + 2] = b;
    }
    return img;
  }

  const std::uint8_t* pixel(int x, int y) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct Hsv {
  double h = 0;  // [0, 360)
  double s = 0;  // [0, 1]
  double v = 0;  // [0, 1]
};

inline Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double c = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0 ? c / mx : 0.0;
  if (c > 0) {
    double h;
    if (mx == r)
      h = (g - b) / c;
    else if (mx == g)
      h = 2.0 + (b - r) / c;
    else
      h = 4.0 + (r - g) / c;
    h *= 60.0;
    if (h < 0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

/// Nearest 8-bit RGB for an HSV triple (h in degrees).
inline void hsv_to_rgb(double h, double s, double v, std::uint8_t& r8,
                       std::uint8_t& g8, std::uint8_t& b8) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  r8 = static_cast<std::uint8_t>(std::clamp(255.0 * (r + m) + 0.5, 0.0, 255.0));
  g8 = static_cast<std::uint8_t>(std::clamp(255.0 * (g + m) + 0.5, 0.0, 255.0));
  b8 = static_cast<std::uint8_t>(std::clamp(255.0 * (b + m) + 0.5, 0.0, 255.0));
}

/// Read a binary PPM (P6, maxval 255).
inline RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw ParseError(path + ": not a P6 PPM");
  auto next_token = [&]() -> long {
    // skip whitespace and '#' comments
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v;
    if (!(in >> v)) throw ParseError(path + ": truncated PPM header");
    return v;
  };
  RgbImage img;
  img.width = static_cast<int>(next_token());
  img.height = static_cast<int>(next_token());
  const long maxval = next_token();
  if (maxval != 255) throw ParseError(path + ": unsupported maxval");
  in.get();  // single whitespace after maxval
  img.data.resize(static_cast<size_t>(img.width) * img.height * 3);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (static_cast<size_t>(in.gcount()) != img.data.size())
    throw ParseError(path + ": truncated pixel data");
  return img;
}

inline void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

}  // namespace avdiar
