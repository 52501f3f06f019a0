#pragma once

#include "nvsgeom/camera.hpp"

#include <vector>

namespace nvs::epipolar {

/// Frobenius-normalized fundamental matrix: x_dst' * F * x_src = 0 for any
/// true correspondence in homogeneous pixel coordinates.
struct FundamentalMatrix {
    Eigen::Matrix3d m;

    /// Normalizes an arbitrary matrix to unit Frobenius norm.
    static FundamentalMatrix from_matrix(const Eigen::Matrix3d& raw);
};

// Below this translation norm the two views share a center and the epipolar
// geometry degenerates; callers fall back to a zero bias.
inline constexpr double kMinBaseline = 1e-8;

/// F = K_dst^{-T} [t]_x R K_src^{-1}. Throws Status::degenerate when the
/// baseline is shorter than kMinBaseline (pure rotation).
FundamentalMatrix fundamental_matrix(const CameraIntrinsics& k_src,
                                     const CameraIntrinsics& k_dst,
                                     const RelativePose& pose);

struct GridShape {
    int rows = 0;
    int cols = 0;
};

// Rows whose epipolar line is degenerate get this distance everywhere.
inline constexpr double kDegenerateDistance = 1e4;

/// Point-to-epipolar-line distances between token grids, in image pixels.
/// Entry (d, s): distance from source token center s to the line F' * x_d
/// of destination token center d. Token (i, j) of an (Hg, Wg) grid sits at
/// pixel ((j + 0.5) * W / Wg, (i + 0.5) * H / Hg).
struct EpipolarDistanceMatrix {
    Eigen::MatrixXd distances;        // (Hd*Wd) x (Hs*Ws)
    std::vector<int> degenerate_rows; // destination tokens filled with the sentinel
};

EpipolarDistanceMatrix epipolar_distance_matrix(const FundamentalMatrix& f,
                                                GridShape grid_dst, GridShape grid_src,
                                                int image_height, int image_width);

/// Learnable per-head mixing scalars. The all-zero default makes the bias
/// vanish identically.
struct EpipolarMixParams {
    double amplitude = 0.0;    // m
    double temperature = 0.0;  // tau
    double cutoff = 0.0;       // c, pixels
    double bias = 0.0;         // b
};

/// Per head: m * sigmoid(tau * (c - D)) + b, elementwise over the distance
/// matrix.
std::vector<Eigen::MatrixXd> attention_bias(const EpipolarDistanceMatrix& d,
                                            const std::vector<EpipolarMixParams>& params);

struct JointAttentionResult {
    Eigen::MatrixXd output;                 // dst_tokens x dim
    std::vector<Eigen::MatrixXd> attention; // per head, dst_tokens x (dst_tokens + src_tokens)
};

/// Joint self/cross attention: queries come from the destination stream,
/// keys and values from the concatenation [dst, src]. The optional per-head
/// bias is added to the cross (src) block of the pre-softmax logits only.
/// Logits are scaled by 1/sqrt(dim/heads) and softmaxed with the row max
/// subtracted.
JointAttentionResult joint_attention(const Eigen::MatrixXd& q_dst,
                                     const Eigen::MatrixXd& k_dst, const Eigen::MatrixXd& v_dst,
                                     const Eigen::MatrixXd& k_src, const Eigen::MatrixXd& v_src,
                                     const std::vector<Eigen::MatrixXd>* bias, int heads);

}  // namespace nvs::epipolar
