#include "nvsgeom/epipolar.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>

namespace nvs::epipolar {

FundamentalMatrix FundamentalMatrix::from_matrix(const Eigen::Matrix3d& raw) {
    if (!raw.allFinite()) fail(Status::invalid_argument, "fundamental matrix has non-finite entries");
    const double norm = raw.norm();
    if (norm < 1e-300) fail(Status::degenerate, "fundamental matrix is numerically zero");
    return {raw / norm};
}

FundamentalMatrix fundamental_matrix(const CameraIntrinsics& k_src,
                                     const CameraIntrinsics& k_dst,
                                     const RelativePose& pose) {
    const Eigen::Matrix3d rot = camera::sanitize_rotation(pose.rotation);
    const Eigen::Vector3d& t = pose.translation;
    if (t.norm() < kMinBaseline) {
        fail(Status::degenerate, "pure rotation: epipolar geometry is undefined");
    }
    Eigen::Matrix3d t_cross;
    t_cross << 0.0, -t.z(), t.y(),
               t.z(), 0.0, -t.x(),
               -t.y(), t.x(), 0.0;
    const Eigen::Matrix3d k_src_inv = camera::intrinsics_matrix(k_src).inverse();
    const Eigen::Matrix3d k_dst_invt = camera::intrinsics_matrix(k_dst).inverse().transpose();
    return FundamentalMatrix::from_matrix(k_dst_invt * t_cross * rot * k_src_inv);
}

EpipolarDistanceMatrix epipolar_distance_matrix(const FundamentalMatrix& f,
                                                GridShape grid_dst, GridShape grid_src,
                                                int image_height, int image_width) {
    if (grid_dst.rows < 1 || grid_dst.cols < 1 || grid_src.rows < 1 || grid_src.cols < 1) {
        fail(Status::invalid_argument, "token grids must be at least 1x1");
    }
    if (image_height < 1 || image_width < 1) {
        fail(Status::invalid_argument, "image extent must be positive");
    }

    const int n_dst = grid_dst.rows * grid_dst.cols;
    const int n_src = grid_src.rows * grid_src.cols;

    EpipolarDistanceMatrix result;
    result.distances.resize(n_dst, n_src);

    const double sx_dst = static_cast<double>(image_width) / grid_dst.cols;
    const double sy_dst = static_cast<double>(image_height) / grid_dst.rows;
    const double sx_src = static_cast<double>(image_width) / grid_src.cols;
    const double sy_src = static_cast<double>(image_height) / grid_src.rows;

    const Eigen::Matrix3d ft = f.m.transpose();
    for (int di = 0; di < grid_dst.rows; ++di) {
        for (int dj = 0; dj < grid_dst.cols; ++dj) {
            const int row = di * grid_dst.cols + dj;
            const Eigen::Vector3d x_dst((dj + 0.5) * sx_dst, (di + 0.5) * sy_dst, 1.0);
            const Eigen::Vector3d line = ft * x_dst;  // epipolar line in the source view
            const double scale = std::hypot(line.x(), line.y());
            if (scale < 1e-12) {
                result.distances.row(row).setConstant(kDegenerateDistance);
                result.degenerate_rows.push_back(row);
                continue;
            }
            for (int si = 0; si < grid_src.rows; ++si) {
                for (int sj = 0; sj < grid_src.cols; ++sj) {
                    const double xs = (sj + 0.5) * sx_src;
                    const double ys = (si + 0.5) * sy_src;
                    const double num = std::abs(line.x() * xs + line.y() * ys + line.z());
                    result.distances(row, si * grid_src.cols + sj) = num / scale;
                }
            }
        }
    }
    return result;
}

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::vector<Eigen::MatrixXd> attention_bias(const EpipolarDistanceMatrix& d,
                                            const std::vector<EpipolarMixParams>& params) {
    if (params.empty()) fail(Status::invalid_argument, "attention_bias: no head parameters");
    std::vector<Eigen::MatrixXd> heads;
    heads.reserve(params.size());
    for (const EpipolarMixParams& p : params) {
        if (!std::isfinite(p.amplitude) || !std::isfinite(p.temperature) ||
            !std::isfinite(p.cutoff) || !std::isfinite(p.bias)) {
            fail(Status::invalid_argument, "attention_bias: non-finite mix parameters");
        }
        Eigen::MatrixXd bias(d.distances.rows(), d.distances.cols());
        for (Eigen::Index r = 0; r < bias.rows(); ++r) {
            for (Eigen::Index c = 0; c < bias.cols(); ++c) {
                bias(r, c) = p.amplitude * sigmoid(p.temperature * (p.cutoff - d.distances(r, c))) + p.bias;
            }
        }
        heads.push_back(std::move(bias));
    }
    return heads;
}

JointAttentionResult joint_attention(const Eigen::MatrixXd& q_dst,
                                     const Eigen::MatrixXd& k_dst, const Eigen::MatrixXd& v_dst,
                                     const Eigen::MatrixXd& k_src, const Eigen::MatrixXd& v_src,
                                     const std::vector<Eigen::MatrixXd>* bias, int heads) {
    const Eigen::Index n_dst = q_dst.rows();
    const Eigen::Index n_src = k_src.rows();
    const Eigen::Index dim = q_dst.cols();

    if (heads < 1 || dim % heads != 0) {
        fail(Status::invalid_argument, "joint_attention: dim must be divisible by heads");
    }
    if (k_dst.rows() != n_dst || v_dst.rows() != n_dst || v_src.rows() != n_src ||
        k_dst.cols() != dim || v_dst.cols() != dim || k_src.cols() != dim || v_src.cols() != dim) {
        fail(Status::invalid_argument, "joint_attention: token matrices disagree on shape");
    }
    if (bias) {
        if (static_cast<int>(bias->size()) != heads) {
            fail(Status::invalid_argument, "joint_attention: bias must provide one matrix per head");
        }
        for (const Eigen::MatrixXd& b : *bias) {
            if (b.rows() != n_dst || b.cols() != n_src) {
                fail(Status::invalid_argument, "joint_attention: bias shape must be dst_tokens x src_tokens");
            }
        }
    }

    const Eigen::Index head_dim = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    JointAttentionResult result;
    result.output.setZero(n_dst, dim);
    result.attention.reserve(heads);

    for (int h = 0; h < heads; ++h) {
        const Eigen::Index off = h * head_dim;
        const auto q = q_dst.middleCols(off, head_dim);

        Eigen::MatrixXd keys(n_dst + n_src, head_dim);
        keys.topRows(n_dst) = k_dst.middleCols(off, head_dim);
        keys.bottomRows(n_src) = k_src.middleCols(off, head_dim);
        Eigen::MatrixXd values(n_dst + n_src, head_dim);
        values.topRows(n_dst) = v_dst.middleCols(off, head_dim);
        values.bottomRows(n_src) = v_src.middleCols(off, head_dim);

        Eigen::MatrixXd logits = (q * keys.transpose()) * scale;
        if (bias) logits.rightCols(n_src) += (*bias)[h];

        // Numerically stable softmax per row.
        for (Eigen::Index r = 0; r < logits.rows(); ++r) {
            const double row_max = logits.row(r).maxCoeff();
            logits.row(r) = (logits.row(r).array() - row_max).exp();
            logits.row(r) /= logits.row(r).sum();
        }

        result.output.middleCols(off, head_dim) = logits * values;
        result.attention.push_back(std::move(logits));
    }
    return result;
}

}  // namespace nvs::epipolar
