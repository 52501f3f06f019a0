#pragma once

#include "nvsgeom/image.hpp"

#include <string>

namespace nvs::image {

/// Read a PNG (gray/palette/RGB/RGBA, 8 or 16 bit) as RGB float in [0, 1].
ImageBuffer read_png(const std::string& path);

/// Write 8-bit RGB PNG. Values are clamped to [0, 1] and rounded.
void write_png(const ImageBuffer& img, const std::string& path);

}  // namespace nvs::image
