#pragma once

#include <cstdint>
#include <vector>

namespace nvs {

/// Interleaved RGB float image, values in [0, 1], row-major.
///
/// Continuous coordinates follow the pixel-area convention: pixel (r, c)
/// covers [c, c+1) x [r, r+1) and its center sits at (c + 0.5, r + 0.5).
/// Under this convention a crop at offset o is the map x -> x - o and a
/// resize by factor s is exactly x -> s*x, which keeps intrinsics updates
/// for crop/resize free of half-pixel terms.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    std::vector<float> data;  // height * width * 3

    ImageBuffer() = default;
    ImageBuffer(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0f) {}

    float& at(int r, int c, int ch) { return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch]; }
    float at(int r, int c, int ch) const { return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch]; }
};

/// Per-pixel validity flags (1 = valid).
struct ValidityMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    ValidityMask() = default;
    ValidityMask(int h, int w, std::uint8_t fill = 1)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

    bool all_valid() const;
};

namespace image {

void validate(const ImageBuffer& img);

/// True when the continuous position (x, y) has a full bilinear support.
bool sample_in_bounds(const ImageBuffer& img, double x, double y);

/// Bilinear sample of channel `ch` at continuous (x, y). Caller guarantees
/// sample_in_bounds.
double sample_bilinear(const ImageBuffer& img, double x, double y, int ch);

ImageBuffer center_crop(const ImageBuffer& img, int crop_h, int crop_w);

/// Box-filter (area average) resample for downscale, bilinear for upscale.
ImageBuffer resize(const ImageBuffer& img, int out_h, int out_w);

/// Center-crop to the largest centered square, then resize to size x size.
ImageBuffer prepare_square(const ImageBuffer& img, int size);

}  // namespace image

}  // namespace nvs
