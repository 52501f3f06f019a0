#include "nvsgeom/image.hpp"

#include "nvsgeom/common.hpp"

#include <algorithm>
#include <cmath>

namespace nvs {

bool ValidityMask::all_valid() const {
    return std::all_of(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; });
}

namespace image {

void validate(const ImageBuffer& img) {
    if (img.height <= 0 || img.width <= 0) {
        fail(Status::invalid_argument, "image has empty extent");
    }
    if (img.data.size() != static_cast<std::size_t>(img.height) * img.width * 3) {
        fail(Status::invalid_argument, "image payload does not match extent");
    }
    for (float v : img.data) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            fail(Status::invalid_argument, "image values must lie in [0, 1]");
        }
    }
}

bool sample_in_bounds(const ImageBuffer& img, double x, double y) {
    return x >= 0.5 && x <= img.width - 0.5 && y >= 0.5 && y <= img.height - 0.5;
}

double sample_bilinear(const ImageBuffer& img, double x, double y, int ch) {
    // Shift to the pixel-center lattice.
    const double xc = x - 0.5;
    const double yc = y - 0.5;
    int x0 = static_cast<int>(std::floor(xc));
    int y0 = static_cast<int>(std::floor(yc));
    x0 = std::clamp(x0, 0, img.width - 2 >= 0 ? img.width - 2 : 0);
    y0 = std::clamp(y0, 0, img.height - 2 >= 0 ? img.height - 2 : 0);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = std::clamp(xc - x0, 0.0, 1.0);
    const double fy = std::clamp(yc - y0, 0.0, 1.0);

    const double v00 = img.at(y0, x0, ch);
    const double v01 = img.at(y0, x1, ch);
    const double v10 = img.at(y1, x0, ch);
    const double v11 = img.at(y1, x1, ch);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
}

ImageBuffer center_crop(const ImageBuffer& img, int crop_h, int crop_w) {
    if (crop_h <= 0 || crop_w <= 0 || crop_h > img.height || crop_w > img.width) {
        fail(Status::invalid_argument, "center_crop: crop exceeds image extent");
    }
    const int r0 = (img.height - crop_h) / 2;
    const int c0 = (img.width - crop_w) / 2;
    ImageBuffer out(crop_h, crop_w);
    for (int r = 0; r < crop_h; ++r) {
        for (int c = 0; c < crop_w; ++c) {
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = img.at(r0 + r, c0 + c, ch);
        }
    }
    return out;
}

namespace {

// Integrates channel ch of one source row-range/col-range box exactly.
double box_average(const ImageBuffer& img, double x0, double x1, double y0, double y1, int ch) {
    const int cx0 = static_cast<int>(std::floor(x0));
    const int cx1 = std::min(static_cast<int>(std::ceil(x1)), img.width);
    const int cy0 = static_cast<int>(std::floor(y0));
    const int cy1 = std::min(static_cast<int>(std::ceil(y1)), img.height);
    double sum = 0.0;
    for (int r = cy0; r < cy1; ++r) {
        const double hy = std::min<double>(r + 1, y1) - std::max<double>(r, y0);
        if (hy <= 0) continue;
        for (int c = cx0; c < cx1; ++c) {
            const double hx = std::min<double>(c + 1, x1) - std::max<double>(c, x0);
            if (hx <= 0) continue;
            sum += hx * hy * img.at(r, c, ch);
        }
    }
    return sum / ((x1 - x0) * (y1 - y0));
}

}  // namespace

ImageBuffer resize(const ImageBuffer& img, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) fail(Status::invalid_argument, "resize: empty target");
    if (out_h == img.height && out_w == img.width) return img;

    ImageBuffer out(out_h, out_w);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    const bool downscale = out_h <= img.height && out_w <= img.width;
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                double v;
                if (downscale) {
                    v = box_average(img, c * sx, (c + 1) * sx, r * sy, (r + 1) * sy, ch);
                } else {
                    // Map the output pixel center back and clamp to the valid
                    // sampling hull.
                    const double x = std::clamp((c + 0.5) * sx, 0.5, img.width - 0.5);
                    const double y = std::clamp((r + 0.5) * sy, 0.5, img.height - 0.5);
                    v = sample_bilinear(img, x, y, ch);
                }
                out.at(r, c, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return out;
}

ImageBuffer prepare_square(const ImageBuffer& img, int size) {
    const int side = std::min(img.height, img.width);
    return resize(center_crop(img, side, side), size, size);
}

}  // namespace image

}  // namespace nvs
