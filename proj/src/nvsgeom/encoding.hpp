#pragma once

#include "nvsgeom/camera.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace nvs::encoding {

inline constexpr std::size_t kPoseEmbeddingSize = 20;

using PoseEmbedding = std::array<double, kPoseEmbeddingSize>;

/// cat(flatten_row_major(3x4 pose), fx_src, fy_src, cx_src, cy_src,
///     fx_dst, fy_dst, cx_dst, cy_dst).
/// The pose argument is the destination-to-source transform.
PoseEmbedding pose_embedding(const RelativePose& pose_dst_to_src,
                             const CameraIntrinsics& k_src, const CameraIntrinsics& k_dst);

struct EmbeddingStats {
    PoseEmbedding mean{};
    PoseEmbedding std{};  // clamped below at 1e-6
};

/// Streaming mean / population-std over embedding vectors (Welford).
class EmbeddingStatsAccumulator {
public:
    void add(const PoseEmbedding& e);
    std::size_t count() const { return count_; }
    EmbeddingStats finalize() const;  // errors on an empty stream

private:
    std::size_t count_ = 0;
    PoseEmbedding mean_{};
    PoseEmbedding m2_{};
};

PoseEmbedding normalize_embedding(const PoseEmbedding& e, const EmbeddingStats& stats);

/// Strictly positive raw depth, arbitrary scale. Larger = farther.
struct DepthMap {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    DepthMap() = default;
    DepthMap(int h, int w, double fill = 1.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
};

/// Invert, divide by the max of the inverted map, then standardize to zero
/// mean / unit std over the map (std clamped at 1e-6). Invariant under
/// global positive rescaling of the input.
DepthMap normalize_depth(const DepthMap& depth);

/// Per destination pixel, the matching source pixel coordinate (x, y), or
/// the sentinel (-1, -1) where nothing landed.
struct CoordinateGrid {
    int height = 0;
    int width = 0;
    int src_width = 0;   // extent of the view the coordinates index into
    int src_height = 0;
    std::vector<double> data;  // height * width * 2, interleaved (x, y)

    CoordinateGrid() = default;
    CoordinateGrid(int h, int w, int sw, int sh)
        : height(h), width(w), src_width(sw), src_height(sh),
          data(static_cast<std::size_t>(h) * w * 2, -1.0) {}

    double& x(int r, int c) { return data[(static_cast<std::size_t>(r) * width + c) * 2]; }
    double x(int r, int c) const { return data[(static_cast<std::size_t>(r) * width + c) * 2]; }
    double& y(int r, int c) { return data[(static_cast<std::size_t>(r) * width + c) * 2 + 1]; }
    double y(int r, int c) const { return data[(static_cast<std::size_t>(r) * width + c) * 2 + 1]; }

    bool is_hole(int r, int c) const { return x(r, c) == -1.0 && y(r, c) == -1.0; }
};

/// grid(x, y) = (x, y): every pixel points at itself.
CoordinateGrid identity_grid(int height, int width);

/// Unproject every source pixel with its depth through k_src, move it by
/// `pose`, project through k_dst, and forward-splat the source coordinate
/// into the nearest destination pixel with z-buffering (nearest destination
/// depth wins; ties keep the lowest source pixel index). Points behind the
/// destination camera are dropped; unfilled pixels hold the sentinel.
CoordinateGrid warp_coordinates(const DepthMap& depth_src,
                                const CameraIntrinsics& k_src, const CameraIntrinsics& k_dst,
                                const RelativePose& pose, int out_height, int out_width);

struct FourierGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;  // height * width * channels

    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
};

/// Sin/cos features over the grid coordinates. Coordinates are normalized
/// to (-1, 1) via u = 2*(x + 0.5)/src_width - 1 (same for y/src_height);
/// frequencies are 2^k * pi for k = 0 .. channels/4 - 1. Channel layout:
/// coordinate-major (x bank then y bank), frequency next, sin before cos.
/// Sentinel pixels encode to all-zero channels.
FourierGrid fourier_features(const CoordinateGrid& grid, int channels = 128);

}  // namespace nvs::encoding
