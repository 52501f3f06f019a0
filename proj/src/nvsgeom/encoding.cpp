#include "nvsgeom/encoding.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nvs::encoding {

PoseEmbedding pose_embedding(const RelativePose& pose_dst_to_src,
                             const CameraIntrinsics& k_src, const CameraIntrinsics& k_dst) {
    camera::validate_intrinsics(k_src);
    camera::validate_intrinsics(k_dst);
    PoseEmbedding e{};
    std::size_t i = 0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) e[i++] = pose_dst_to_src.rotation(r, c);
        e[i++] = pose_dst_to_src.translation(r);
    }
    e[i++] = k_src.fx;
    e[i++] = k_src.fy;
    e[i++] = k_src.cx;
    e[i++] = k_src.cy;
    e[i++] = k_dst.fx;
    e[i++] = k_dst.fy;
    e[i++] = k_dst.cx;
    e[i++] = k_dst.cy;
    return e;
}

void EmbeddingStatsAccumulator::add(const PoseEmbedding& e) {
    ++count_;
    for (std::size_t i = 0; i < kPoseEmbeddingSize; ++i) {
        if (!std::isfinite(e[i])) fail(Status::invalid_argument, "embedding has non-finite entries");
        const double delta = e[i] - mean_[i];
        mean_[i] += delta / static_cast<double>(count_);
        m2_[i] += delta * (e[i] - mean_[i]);
    }
}

EmbeddingStats EmbeddingStatsAccumulator::finalize() const {
    if (count_ == 0) fail(Status::invalid_argument, "embedding stats over an empty stream");
    EmbeddingStats stats;
    stats.mean = mean_;
    for (std::size_t i = 0; i < kPoseEmbeddingSize; ++i) {
        const double var = m2_[i] / static_cast<double>(count_);  // population
        stats.std[i] = std::max(std::sqrt(std::max(var, 0.0)), 1e-6);
    }
    return stats;
}

PoseEmbedding normalize_embedding(const PoseEmbedding& e, const EmbeddingStats& stats) {
    PoseEmbedding out{};
    for (std::size_t i = 0; i < kPoseEmbeddingSize; ++i) {
        out[i] = (e[i] - stats.mean[i]) / stats.std[i];
    }
    return out;
}

DepthMap normalize_depth(const DepthMap& depth) {
    if (depth.height <= 0 || depth.width <= 0) {
        fail(Status::invalid_argument, "normalize_depth: empty map");
    }
    DepthMap inv(depth.height, depth.width);
    double max_inv = 0.0;
    for (std::size_t i = 0; i < depth.data.size(); ++i) {
        const double d = depth.data[i];
        if (!(d > 0.0) || !std::isfinite(d)) {
            fail(Status::invalid_argument, "normalize_depth: depth must be strictly positive");
        }
        inv.data[i] = 1.0 / d;
        max_inv = std::max(max_inv, inv.data[i]);
    }
    double mean = 0.0;
    for (double& v : inv.data) {
        v /= max_inv;
        mean += v;
    }
    mean /= static_cast<double>(inv.data.size());
    double var = 0.0;
    for (double v : inv.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(inv.data.size());
    const double sd = std::max(std::sqrt(var), 1e-6);
    for (double& v : inv.data) v = (v - mean) / sd;
    return inv;
}

CoordinateGrid identity_grid(int height, int width) {
    CoordinateGrid grid(height, width, width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            grid.x(r, c) = c;
            grid.y(r, c) = r;
        }
    }
    return grid;
}

CoordinateGrid warp_coordinates(const DepthMap& depth_src,
                                const CameraIntrinsics& k_src, const CameraIntrinsics& k_dst,
                                const RelativePose& pose, int out_height, int out_width) {
    if (depth_src.height <= 0 || depth_src.width <= 0 || out_height <= 0 || out_width <= 0) {
        fail(Status::invalid_argument, "warp_coordinates: empty extent");
    }
    const Eigen::Matrix3d k_src_inv = camera::intrinsics_matrix(k_src).inverse();
    const Eigen::Matrix3d k_dst_m = camera::intrinsics_matrix(k_dst);
    const Eigen::Matrix3d rot = camera::sanitize_rotation(pose.rotation);

    CoordinateGrid grid(out_height, out_width, depth_src.width, depth_src.height);
    std::vector<double> zbuf(static_cast<std::size_t>(out_height) * out_width,
                             std::numeric_limits<double>::infinity());

    for (int r = 0; r < depth_src.height; ++r) {
        for (int c = 0; c < depth_src.width; ++c) {
            const double d = depth_src.at(r, c);
            if (!(d > 0.0) || !std::isfinite(d)) {
                fail(Status::invalid_argument, "warp_coordinates: depth must be strictly positive");
            }
            const Eigen::Vector3d ray = k_src_inv * Eigen::Vector3d(c, r, 1.0);
            const Eigen::Vector3d x_dst = rot * (d * ray) + pose.translation;
            if (x_dst.z() <= 1e-12) continue;  // behind (or at) the destination camera
            const Eigen::Vector3d proj = k_dst_m * x_dst;
            const double px = proj.x() / proj.z();
            const double py = proj.y() / proj.z();
            const long long xi = std::llround(px);
            const long long yi = std::llround(py);
            if (xi < 0 || xi >= out_width || yi < 0 || yi >= out_height) continue;
            const std::size_t idx = static_cast<std::size_t>(yi) * out_width + xi;
            // Row-major traversal means earlier source pixels win ties.
            if (x_dst.z() < zbuf[idx]) {
                zbuf[idx] = x_dst.z();
                grid.x(static_cast<int>(yi), static_cast<int>(xi)) = c;
                grid.y(static_cast<int>(yi), static_cast<int>(xi)) = r;
            }
        }
    }
    return grid;
}

FourierGrid fourier_features(const CoordinateGrid& grid, int channels) {
    if (grid.height <= 0 || grid.width <= 0 || grid.src_width <= 0 || grid.src_height <= 0) {
        fail(Status::invalid_argument, "fourier_features: malformed grid");
    }
    if (channels <= 0 || channels % 4 != 0) {
        fail(Status::invalid_argument, "fourier_features: channels must be a positive multiple of 4");
    }
    const int freqs = channels / 4;
    FourierGrid out;
    out.height = grid.height;
    out.width = grid.width;
    out.channels = channels;
    out.data.assign(static_cast<std::size_t>(grid.height) * grid.width * channels, 0.0);

    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            if (grid.is_hole(r, c)) continue;  // sentinel -> all-zero channels
            const double gx = grid.x(r, c);
            const double gy = grid.y(r, c);
            if (!std::isfinite(gx) || !std::isfinite(gy)) {
                fail(Status::invalid_argument, "fourier_features: non-finite coordinate");
            }
            const double coords[2] = {2.0 * (gx + 0.5) / grid.src_width - 1.0,
                                      2.0 * (gy + 0.5) / grid.src_height - 1.0};
            double* px = &out.data[(static_cast<std::size_t>(r) * grid.width + c) * channels];
            int ch = 0;
            for (double u : coords) {
                double freq = std::numbers::pi;
                for (int k = 0; k < freqs; ++k) {
                    px[ch++] = std::sin(freq * u);
                    px[ch++] = std::cos(freq * u);
                    freq *= 2.0;
                }
            }
        }
    }
    return out;
}

}  // namespace nvs::encoding
