#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nvs {

/// Pinhole intrinsics in pixel units.
struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// World -> camera rigid transform: x_cam = R * x_world + t.
struct CameraExtrinsics {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Source-camera -> destination-camera rigid transform.
struct RelativePose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

namespace camera {

// Orthonormality policy on ingest: rotations of deviation <= kRotationKeepTol
// are taken verbatim (keeps clean inputs bit-stable through round trips),
// deviations up to kRotationFixTol are snapped to the nearest rotation by
// polar decomposition, anything worse is rejected.
inline constexpr double kRotationKeepTol = 1e-9;
inline constexpr double kRotationFixTol = 1e-6;

/// Max-abs deviation of R'R from I combined with |det(R) - 1|.
double rotation_deviation(const Eigen::Matrix3d& r);

/// Apply the ingest policy above. Throws Status::invalid_argument when the
/// matrix is not a rotation within kRotationFixTol.
Eigen::Matrix3d sanitize_rotation(const Eigen::Matrix3d& r);

void validate_intrinsics(const CameraIntrinsics& k);

/// T_{s->d} = T_dst * T_src^{-1}, composed through 4x4 homogeneous matrices.
RelativePose relative_pose(const CameraExtrinsics& src, const CameraExtrinsics& dst);

RelativePose inverse(const RelativePose& pose);
RelativePose compose(const RelativePose& second, const RelativePose& first);

/// K = [[fx, 0, cx], [0, fy, cy], [0, 0, 1]].
Eigen::Matrix3d intrinsics_matrix(const CameraIntrinsics& k);

/// Scale every pixel quantity (focal lengths, principal point, size) by
/// `factor`. Extrinsics are resolution independent and never touched.
CameraIntrinsics rescale_intrinsics(const CameraIntrinsics& k, double factor);

/// Shift the principal point for a crop whose top-left corner is (x0, y0).
CameraIntrinsics crop_intrinsics(const CameraIntrinsics& k, double x0, double y0,
                                 double crop_width, double crop_height);

/// Rotation from Euler angles in degrees, composed R = Rz(roll) * Rx(pitch) * Ry(yaw).
/// Axes follow the COLMAP-style convention with x left, y down, z forward;
/// positive yaw turns the forward axis towards -x.
Eigen::Matrix3d rotation_from_ypr(double yaw_deg, double pitch_deg, double roll_deg);

}  // namespace camera

}  // namespace nvs
