#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately written in the most literal way possible (scalar
// loops, direct formulas) so it can serve as a cross-check for the library
// implementations rather than mirroring them.

#include "nvsgeom/camera.hpp"
#include "nvsgeom/image.hpp"
#include "nvsgeom/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace testsupport {

inline Eigen::Matrix3d random_rotation(nvs::Rng& rng) {
    // Quaternion from four normal draws, normalized.
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

inline nvs::CameraExtrinsics random_extrinsics(nvs::Rng& rng, double translation_scale = 2.0) {
    nvs::CameraExtrinsics e;
    e.rotation = random_rotation(rng);
    e.translation = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) *
                    translation_scale;
    return e;
}

inline nvs::CameraIntrinsics random_intrinsics(nvs::Rng& rng, double width = 256, double height = 256) {
    nvs::CameraIntrinsics k;
    k.fx = rng.uniform(0.8, 2.0) * width;
    k.fy = rng.uniform(0.8, 2.0) * height;
    k.cx = width * rng.uniform(0.4, 0.6);
    k.cy = height * rng.uniform(0.4, 0.6);
    k.width = width;
    k.height = height;
    return k;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// PSNR restricted to pixels where `valid` is nonzero. Plain double loop.
inline double masked_psnr(const nvs::ImageBuffer& a, const nvs::ImageBuffer& b,
                          const nvs::ValidityMask& valid) {
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < a.height; ++r) {
        for (int c = 0; c < a.width; ++c) {
            if (!valid.at(r, c)) continue;
            for (int ch = 0; ch < 3; ++ch) {
                const double d = static_cast<double>(a.at(r, c, ch)) - b.at(r, c, ch);
                sum_sq += d * d;
                ++n;
            }
        }
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double mse = sum_sq / static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

/// Smooth multi-scale random field, in the spirit of a photographic image:
/// a coarse layer bilinearly upsampled plus a weaker mid-frequency layer.
inline nvs::ImageBuffer synthetic_photo(nvs::Rng& rng, int size = 512) {
    auto layer = [&](int coarse, double amplitude) {
        nvs::ImageBuffer small(coarse, coarse);
        for (float& v : small.data) v = static_cast<float>(rng.uniform());
        nvs::ImageBuffer up = nvs::image::resize(small, size, size);
        for (float& v : up.data) v = static_cast<float>(v * amplitude);
        return up;
    };
    const nvs::ImageBuffer base = layer(8, 0.55);
    const nvs::ImageBuffer mid = layer(32, 0.25);
    nvs::ImageBuffer out(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const double gradient =
                    0.10 * (static_cast<double>(r) / size) + 0.05 * (static_cast<double>(c) / size);
                const double v = 0.05 + gradient + base.at(r, c, ch) + mid.at(r, c, ch);
                out.at(r, c, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return out;
}

}  // namespace testsupport
