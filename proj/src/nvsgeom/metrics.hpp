#pragma once

#include "nvsgeom/image.hpp"

#include <Eigen/Dense>

namespace nvs::metrics {

/// 10 * log10(1 / MSE) over all channels of two [0, 1] images. Identical
/// inputs return +infinity.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

struct GaussianSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // symmetric PSD, 1/(n-1) normalization
};

/// Single-pass mean/covariance accumulator (Welford) with exact pairwise
/// merge, so partial accumulations over shards combine losslessly.
class FeatureAccumulator {
public:
    explicit FeatureAccumulator(Eigen::Index dim);

    void add(const Eigen::Ref<const Eigen::VectorXd>& x);
    void merge(const FeatureAccumulator& other);

    Eigen::Index dim() const { return mean_.size(); }
    std::size_t count() const { return count_; }

    /// Sample covariance (1/(n-1)); requires count >= 2.
    GaussianSummary finalize() const;

private:
    std::size_t count_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd m2_;
};

/// Rows are samples. Requires n >= 2 finite rows.
GaussianSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& features);

/// ||mu_a - mu_b||^2 + tr(Sa + Sb - 2 (Sa^{1/2} Sb Sa^{1/2})^{1/2}).
/// Matrix square roots go through symmetric eigendecompositions with
/// negative eigenvalues clamped at 1e-9 * lambda_max; the result is clamped
/// at zero.
double frechet_distance(const GaussianSummary& a, const GaussianSummary& b);

/// Frechet distance between per-sample concatenations (src_i || dst_i); the
/// two pairings must be aligned and equally sized within each set.
double joint_frechet_distance(const Eigen::Ref<const Eigen::MatrixXd>& src_a,
                              const Eigen::Ref<const Eigen::MatrixXd>& dst_a,
                              const Eigen::Ref<const Eigen::MatrixXd>& src_b,
                              const Eigen::Ref<const Eigen::MatrixXd>& dst_b);

}  // namespace nvs::metrics
