#pragma once

// Color images as H x W pure quaternion matrices (r, g, b on i, j, k) in [0, 1].

#include <string>

#include "quatpinv/qmatrix.hpp"

namespace quatpinv {

/// Binary P6 with maxval 255 (or up to 65535, two bytes per sample).
QMatrix read_ppm(const std::string& path);
/// Writes P6 with maxval 255; components are clamped to [0, 1].
void write_ppm(const std::string& path, const QMatrix& image);

/// Deterministic piecewise-smooth test image: gradients, a disk, a bar and a
/// ring with distinct colors.
QMatrix synthetic_image(Index height, Index width);

}  // namespace quatpinv
