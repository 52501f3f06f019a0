#pragma once

#include "nvsgeom/camera.hpp"
#include "nvsgeom/image.hpp"
#include "nvsgeom/rng.hpp"

namespace nvs::homoaug {

/// Angle/crop regimes for the rotation-only augmentation. One regime is
/// drawn per pair (p = 0.5) and shared by both views so the crops match.
enum class Regime { narrow, wide };

struct RotationSample {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    Regime regime = Regime::narrow;
    int crop = 384;
};

// narrow: |yaw|, |pitch| <= 5.5 deg, roll = 0, crop 384
// wide:   |yaw|, |pitch| <= 8.3 deg, |roll| <= 3.5 deg, crop 320
inline constexpr double kNarrowMaxAngleDeg = 5.5;
inline constexpr double kWideMaxAngleDeg = 8.3;
inline constexpr double kWideMaxRollDeg = 3.5;
inline constexpr int kNarrowCrop = 384;
inline constexpr int kWideCrop = 320;

/// Intrinsics the warp simulates for the 512x512 input.
CameraIntrinsics augmentation_intrinsics();

/// Draw a shared regime, then per-view angles uniform in the regime ranges.
std::pair<RotationSample, RotationSample> sample_rotation(Rng& rng);

/// H = K R K^{-1}, normalized so H(2,2) = 1.
Eigen::Matrix3d homography_from_rotation(const CameraIntrinsics& k, const Eigen::Matrix3d& r);

struct WarpResult {
    ImageBuffer image;
    ValidityMask mask;
};

/// Inverse warp: output pixel center p samples the input at H^{-1} p with
/// bilinear interpolation. Samples outside the input are zero-filled and
/// marked invalid.
WarpResult warp_image(const ImageBuffer& img, const Eigen::Matrix3d& h,
                      int out_height, int out_width);

/// Push a validity mask through the same warp; an output pixel stays valid
/// only if the sampling position is in bounds and all four taps were valid.
ValidityMask warp_mask(const ValidityMask& mask, const Eigen::Matrix3d& h,
                       int out_height, int out_width);

struct AugmentedPair {
    ImageBuffer src_image;
    ImageBuffer dst_image;
    RelativePose relative_pose;  // rotation only, translation exactly zero
    CameraIntrinsics k_src;
    CameraIntrinsics k_dst;
    RotationSample rot_src;
    RotationSample rot_dst;
    int attempts = 1;
};

inline constexpr int kMaxAttempts = 10;

/// Deterministic assembly for fixed rotations: warp both views, center-crop
/// to the regime size, require the crops fully valid (throws
/// Status::degenerate otherwise), resize to model_resolution, and emit the
/// relative pose R_dst * R_src^T with intrinsics adjusted for crop + resize.
AugmentedPair make_pair_from(const ImageBuffer& img512,
                             const RotationSample& rot_src, const RotationSample& rot_dst,
                             int model_resolution);

/// Sampling wrapper around make_pair_from: redraws the rotations when a crop
/// leaves the valid region, up to kMaxAttempts, then throws
/// Status::numeric_error. Input must be 512x512.
AugmentedPair make_pair(const ImageBuffer& img512, Rng& rng, int model_resolution);

}  // namespace nvs::homoaug
