#include "nvsgeom/homoaug.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>

namespace nvs::homoaug {

CameraIntrinsics augmentation_intrinsics() {
    return {307.2, 307.2, 256.0, 256.0, 512.0, 512.0};
}

std::pair<RotationSample, RotationSample> sample_rotation(Rng& rng) {
    const Regime regime = rng.uniform() < 0.5 ? Regime::narrow : Regime::wide;
    auto draw = [&](void) -> RotationSample {
        RotationSample s;
        s.regime = regime;
        if (regime == Regime::narrow) {
            s.yaw_deg = rng.uniform(-kNarrowMaxAngleDeg, kNarrowMaxAngleDeg);
            s.pitch_deg = rng.uniform(-kNarrowMaxAngleDeg, kNarrowMaxAngleDeg);
            s.roll_deg = 0.0;
            s.crop = kNarrowCrop;
        } else {
            s.yaw_deg = rng.uniform(-kWideMaxAngleDeg, kWideMaxAngleDeg);
            s.pitch_deg = rng.uniform(-kWideMaxAngleDeg, kWideMaxAngleDeg);
            s.roll_deg = rng.uniform(-kWideMaxRollDeg, kWideMaxRollDeg);
            s.crop = kWideCrop;
        }
        return s;
    };
    RotationSample src = draw();
    RotationSample dst = draw();
    return {src, dst};
}

Eigen::Matrix3d homography_from_rotation(const CameraIntrinsics& k, const Eigen::Matrix3d& r) {
    const Eigen::Matrix3d km = camera::intrinsics_matrix(k);
    const Eigen::Matrix3d rot = camera::sanitize_rotation(r);
    Eigen::Matrix3d h = km * rot * km.inverse();
    if (std::abs(h(2, 2)) < 1e-300) fail(Status::numeric_error, "homography has zero scale entry");
    return h / h(2, 2);
}

WarpResult warp_image(const ImageBuffer& img, const Eigen::Matrix3d& h,
                      int out_height, int out_width) {
    if (out_height <= 0 || out_width <= 0) {
        fail(Status::invalid_argument, "warp_image: empty output extent");
    }
    if (!h.allFinite()) fail(Status::invalid_argument, "warp_image: non-finite homography");
    if (std::abs(h.determinant()) < 1e-12) {
        fail(Status::invalid_argument, "warp_image: homography is not invertible");
    }
    const Eigen::Matrix3d hinv = h.inverse();

    WarpResult out{ImageBuffer(out_height, out_width), ValidityMask(out_height, out_width, 0)};
    for (int r = 0; r < out_height; ++r) {
        for (int c = 0; c < out_width; ++c) {
            const Eigen::Vector3d p = hinv * Eigen::Vector3d(c + 0.5, r + 0.5, 1.0);
            if (std::abs(p.z()) < 1e-12) continue;
            const double x = p.x() / p.z();
            const double y = p.y() / p.z();
            if (!image::sample_in_bounds(img, x, y)) continue;
            out.mask.at(r, c) = 1;
            for (int ch = 0; ch < 3; ++ch) {
                out.image.at(r, c, ch) =
                    static_cast<float>(std::clamp(image::sample_bilinear(img, x, y, ch), 0.0, 1.0));
            }
        }
    }
    return out;
}

ValidityMask warp_mask(const ValidityMask& mask, const Eigen::Matrix3d& h,
                       int out_height, int out_width) {
    ImageBuffer as_image(mask.height, mask.width);
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const float v = mask.at(r, c) ? 1.0f : 0.0f;
            for (int ch = 0; ch < 3; ++ch) as_image.at(r, c, ch) = v;
        }
    }
    const WarpResult warped = warp_image(as_image, h, out_height, out_width);
    ValidityMask out(out_height, out_width, 0);
    for (int r = 0; r < out_height; ++r) {
        for (int c = 0; c < out_width; ++c) {
            // Strict: every contributing tap must have been valid.
            out.at(r, c) = warped.mask.at(r, c) && warped.image.at(r, c, 0) > 1.0f - 1e-6f;
        }
    }
    return out;
}

namespace {

bool crop_fully_valid(const ValidityMask& mask, int crop) {
    const int r0 = (mask.height - crop) / 2;
    const int c0 = (mask.width - crop) / 2;
    for (int r = 0; r < crop; ++r) {
        for (int c = 0; c < crop; ++c) {
            if (!mask.at(r0 + r, c0 + c)) return false;
        }
    }
    return true;
}

}  // namespace

AugmentedPair make_pair_from(const ImageBuffer& img512,
                             const RotationSample& rot_src, const RotationSample& rot_dst,
                             int model_resolution) {
    if (img512.height != 512 || img512.width != 512) {
        fail(Status::invalid_argument, "make_pair: input must be 512x512");
    }
    if (model_resolution <= 0) {
        fail(Status::invalid_argument, "make_pair: model resolution must be positive");
    }
    if (rot_src.crop != rot_dst.crop) {
        fail(Status::invalid_argument, "make_pair: views must share a crop size");
    }

    const CameraIntrinsics k = augmentation_intrinsics();
    const Eigen::Matrix3d r_src =
        camera::rotation_from_ypr(rot_src.yaw_deg, rot_src.pitch_deg, rot_src.roll_deg);
    const Eigen::Matrix3d r_dst =
        camera::rotation_from_ypr(rot_dst.yaw_deg, rot_dst.pitch_deg, rot_dst.roll_deg);

    const WarpResult warped_src = warp_image(img512, homography_from_rotation(k, r_src), 512, 512);
    const WarpResult warped_dst = warp_image(img512, homography_from_rotation(k, r_dst), 512, 512);

    const int crop = rot_src.crop;
    if (!crop_fully_valid(warped_src.mask, crop) || !crop_fully_valid(warped_dst.mask, crop)) {
        fail(Status::degenerate, "make_pair: crop leaves the valid warp region");
    }

    const double offset = (512 - crop) / 2.0;
    const CameraIntrinsics k_crop = camera::crop_intrinsics(k, offset, offset, crop, crop);
    const CameraIntrinsics k_final =
        camera::rescale_intrinsics(k_crop, static_cast<double>(model_resolution) / crop);

    AugmentedPair pair;
    pair.src_image = image::resize(image::center_crop(warped_src.image, crop, crop),
                                   model_resolution, model_resolution);
    pair.dst_image = image::resize(image::center_crop(warped_dst.image, crop, crop),
                                   model_resolution, model_resolution);
    pair.relative_pose.rotation = r_dst * r_src.transpose();
    pair.relative_pose.translation.setZero();
    pair.k_src = k_final;
    pair.k_dst = k_final;
    pair.rot_src = rot_src;
    pair.rot_dst = rot_dst;
    return pair;
}

AugmentedPair make_pair(const ImageBuffer& img512, Rng& rng, int model_resolution) {
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        const auto [rot_src, rot_dst] = sample_rotation(rng);
        try {
            AugmentedPair pair = make_pair_from(img512, rot_src, rot_dst, model_resolution);
            pair.attempts = attempt;
            return pair;
        } catch (const Error& e) {
            if (e.status() != Status::degenerate) throw;
            NVS_LOG_DEBUG("augmentation attempt %d rejected: %s", attempt, e.what());
        }
    }
    fail(Status::numeric_error,
         "augmentation failed after 10 attempts; crop bounds do not fit the warp");
}

}  // namespace nvs::homoaug
