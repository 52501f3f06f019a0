#include "nvsgeom/camera.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>
#include <numbers>

namespace nvs::camera {

double rotation_deviation(const Eigen::Matrix3d& r) {
    const Eigen::Matrix3d gram = r.transpose() * r;
    const double ortho = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    const double det = std::abs(r.determinant() - 1.0);
    return std::max(ortho, det);
}

Eigen::Matrix3d sanitize_rotation(const Eigen::Matrix3d& r) {
    if (!r.allFinite()) fail(Status::invalid_argument, "rotation has non-finite entries");
    const double dev = rotation_deviation(r);
    if (dev <= kRotationKeepTol) return r;
    if (dev > kRotationFixTol) {
        fail(Status::invalid_argument, "matrix is not a rotation within tolerance 1e-6");
    }
    // Polar factor: nearest orthonormal matrix in Frobenius norm.
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d fixed = svd.matrixU() * svd.matrixV().transpose();
    if (fixed.determinant() < 0.0) {
        fail(Status::invalid_argument, "matrix reflects; determinant is -1");
    }
    return fixed;
}

void validate_intrinsics(const CameraIntrinsics& k) {
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
        fail(Status::invalid_argument, "intrinsics: focal lengths must be positive");
    }
    if (!std::isfinite(k.cx) || !std::isfinite(k.cy)) {
        fail(Status::invalid_argument, "intrinsics: non-finite principal point");
    }
    if (k.width > 0.0 && (k.cx < 0.0 || k.cx > k.width)) {
        fail(Status::invalid_argument, "intrinsics: cx outside [0, width]");
    }
    if (k.height > 0.0 && (k.cy < 0.0 || k.cy > k.height)) {
        fail(Status::invalid_argument, "intrinsics: cy outside [0, height]");
    }
}

namespace {

Eigen::Matrix4d homogeneous(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = t;
    return m;
}

}  // namespace

RelativePose relative_pose(const CameraExtrinsics& src, const CameraExtrinsics& dst) {
    const Eigen::Matrix3d r_src = sanitize_rotation(src.rotation);
    const Eigen::Matrix3d r_dst = sanitize_rotation(dst.rotation);
    const Eigen::Matrix4d t_src = homogeneous(r_src, src.translation);
    const Eigen::Matrix4d t_dst = homogeneous(r_dst, dst.translation);
    const Eigen::Matrix4d rel = t_dst * t_src.inverse();
    RelativePose pose;
    pose.rotation = rel.topLeftCorner<3, 3>();
    pose.translation = rel.topRightCorner<3, 1>();
    return pose;
}

RelativePose inverse(const RelativePose& pose) {
    RelativePose inv;
    inv.rotation = pose.rotation.transpose();
    inv.translation = -inv.rotation * pose.translation;
    return inv;
}

RelativePose compose(const RelativePose& second, const RelativePose& first) {
    RelativePose out;
    out.rotation = second.rotation * first.rotation;
    out.translation = second.rotation * first.translation + second.translation;
    return out;
}

Eigen::Matrix3d intrinsics_matrix(const CameraIntrinsics& k) {
    validate_intrinsics(k);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = k.fx;
    m(1, 1) = k.fy;
    m(0, 2) = k.cx;
    m(1, 2) = k.cy;
    return m;
}

CameraIntrinsics rescale_intrinsics(const CameraIntrinsics& k, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        fail(Status::invalid_argument, "rescale_intrinsics: factor must be positive");
    }
    return {k.fx * factor, k.fy * factor, k.cx * factor,
            k.cy * factor, k.width * factor, k.height * factor};
}

CameraIntrinsics crop_intrinsics(const CameraIntrinsics& k, double x0, double y0,
                                 double crop_width, double crop_height) {
    if (!(crop_width > 0.0) || !(crop_height > 0.0)) {
        fail(Status::invalid_argument, "crop_intrinsics: crop size must be positive");
    }
    return {k.fx, k.fy, k.cx - x0, k.cy - y0, crop_width, crop_height};
}

Eigen::Matrix3d rotation_from_ypr(double yaw_deg, double pitch_deg, double roll_deg) {
    if (!std::isfinite(yaw_deg) || !std::isfinite(pitch_deg) || !std::isfinite(roll_deg)) {
        fail(Status::invalid_argument, "rotation_from_ypr: non-finite angle");
    }
    const double deg = std::numbers::pi / 180.0;
    const double cy = std::cos(yaw_deg * deg), sy = std::sin(yaw_deg * deg);
    const double cp = std::cos(pitch_deg * deg), sp = std::sin(pitch_deg * deg);
    const double cr = std::cos(roll_deg * deg), sr = std::sin(roll_deg * deg);

    Eigen::Matrix3d ry, rx, rz;
    // Positive yaw maps forward (0,0,1) to (-sin, 0, cos): the camera turns
    // right when x points left.
    ry << cy, 0.0, -sy,
          0.0, 1.0, 0.0,
          sy, 0.0, cy;
    rx << 1.0, 0.0, 0.0,
          0.0, cp, sp,
          0.0, -sp, cp;
    rz << cr, sr, 0.0,
          -sr, cr, 0.0,
          0.0, 0.0, 1.0;
    return rz * rx * ry;
}

}  // namespace nvs::camera
