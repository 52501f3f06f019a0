#include "nvsgeom/image_io.hpp"

#include "nvsgeom/common.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace nvs::image {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

ImageBuffer read_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(Status::io_error, "cannot open: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        fail(Status::parse_error, "not a PNG file: " + path);
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(Status::io_error, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(Status::io_error, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(Status::parse_error, "libpng error while reading: " + path);
    }

    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    std::vector<png_byte> raster(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) rows[r] = raster.data() + rowbytes * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageBuffer img(height, width);
    for (int r = 0; r < height; ++r) {
        const png_byte* row = raster.data() + rowbytes * r;
        for (int c = 0; c < width; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                img.at(r, c, ch) = static_cast<float>(row[c * 3 + ch]) / 255.0f;
            }
        }
    }
    return img;
}

void write_png(const ImageBuffer& img, const std::string& path) {
    validate(img);
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) fail(Status::io_error, "cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(Status::io_error, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(Status::io_error, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(Status::io_error, "libpng error while writing: " + path);
    }

    png_init_io(png, f.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const float v = img.at(r, c, ch);
                row[c * 3 + ch] = static_cast<png_byte>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace nvs::image
