#include "quatpinv/apps/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

namespace quatpinv {

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(ch);
    }
  }
  return tok;
}

}  // namespace

QMatrix read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  if (header_token(in) != "P6") throw IoError(path + ": not a binary PPM (P6)");
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(header_token(in));
    h = std::stol(header_token(in));
    maxval = std::stol(header_token(in));
  } catch (const std::exception&) {
    throw IoError(path + ": malformed PPM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError(path + ": bad PPM dimensions");
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w * h * 3 * bytes));
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw IoError(path + ": truncated pixel data");
  QMatrix img(h, w);
  std::size_t t = 0;
  auto sample = [&] {
    unsigned v = raw[t++];
    if (bytes == 2) v = (v << 8) | raw[t++];
    return static_cast<double>(v) / static_cast<double>(maxval);
  };
  for (auto& q : img.data()) {
    q.b = sample();
    q.c = sample();
    q.d = sample();
  }
  return img;
}

void write_ppm(const std::string& path, const QMatrix& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(image.size() * 3));
  auto byte = [](double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  for (const auto& q : image.data()) {
    raw.push_back(byte(q.b));
    raw.push_back(byte(q.c));
    raw.push_back(byte(q.d));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing " + path);
}

QMatrix synthetic_image(Index height, Index width) {
  QMatrix img(height, width);
  for (Index i = 0; i < height; ++i) {
    for (Index j = 0; j < width; ++j) {
      const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(height);
      const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(width);
      double r = 0.2 + 0.5 * x, g = 0.3 + 0.4 * y, b = 0.6 - 0.3 * x * y;
      const double dx = x - 0.35, dy = y - 0.4;
      if (dx * dx + dy * dy < 0.04) {
        r = 0.9;
        g = 0.2 + 0.3 * x;
        b = 0.1;
      }
      if (x > 0.6 && x < 0.85 && y > 0.15 && y < 0.8) {
        r = 0.1;
        g = 0.75;
        b = 0.3 + 0.4 * y;
      }
      const double ring = std::hypot(x - 0.7, y - 0.75);
      if (ring > 0.12 && ring < 0.17) {
        r = 0.95;
        g = 0.9;
        b = 0.2;
      }
      img(i, j) = Quat(0.0, r, g, b);
    }
  }
  return img;
}

}  // namespace quatpinv
