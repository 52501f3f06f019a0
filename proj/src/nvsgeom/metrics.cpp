#include "nvsgeom/metrics.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>
#include <limits>

namespace nvs::metrics {

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.height != b.height || a.width != b.width) {
        fail(Status::invalid_argument, "psnr: image shapes differ");
    }
    image::validate(a);
    image::validate(b);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sum_sq += d * d;
    }
    const double mse = sum_sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

FeatureAccumulator::FeatureAccumulator(Eigen::Index dim) {
    if (dim < 1) fail(Status::invalid_argument, "feature accumulator needs a positive dimension");
    mean_ = Eigen::VectorXd::Zero(dim);
    m2_ = Eigen::MatrixXd::Zero(dim, dim);
}

void FeatureAccumulator::add(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != mean_.size()) fail(Status::invalid_argument, "feature dimension mismatch");
    if (!x.allFinite()) fail(Status::invalid_argument, "feature vector has non-finite entries");
    ++count_;
    const Eigen::VectorXd delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_.noalias() += delta * (x - mean_).transpose();
}

void FeatureAccumulator::merge(const FeatureAccumulator& other) {
    if (other.mean_.size() != mean_.size()) {
        fail(Status::invalid_argument, "cannot merge accumulators of different dimension");
    }
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const Eigen::VectorXd delta = other.mean_ - mean_;
    m2_ += other.m2_ + (na * nb / (na + nb)) * (delta * delta.transpose());
    mean_ += (nb / (na + nb)) * delta;
    count_ += other.count_;
}

GaussianSummary FeatureAccumulator::finalize() const {
    if (count_ < 2) fail(Status::invalid_argument, "covariance needs at least two samples");
    GaussianSummary s;
    s.mean = mean_;
    s.cov = m2_ / static_cast<double>(count_ - 1);
    s.cov = 0.5 * (s.cov + s.cov.transpose());  // kill accumulation skew
    return s;
}

GaussianSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& features) {
    if (features.rows() < 2) fail(Status::invalid_argument, "summarize: need at least two samples");
    FeatureAccumulator acc(features.cols());
    for (Eigen::Index i = 0; i < features.rows(); ++i) acc.add(features.row(i).transpose());
    return acc.finalize();
}

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* label) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        fail(Status::invalid_argument, std::string(label) + ": covariance is not symmetric");
    }
}

// PSD square root via eigendecomposition; eigenvalues below the clamping
// threshold count as zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
    if (eig.info() != Eigen::Success) fail(Status::numeric_error, "eigendecomposition failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    const double lambda_max = ev.maxCoeff();
    const double floor_value = lambda_max > 0.0 ? 1e-9 * lambda_max : 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        ev(i) = ev(i) > floor_value ? std::sqrt(ev(i)) : 0.0;
    }
    return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
    if (a.mean.size() != b.mean.size()) {
        fail(Status::invalid_argument, "frechet_distance: dimension mismatch");
    }
    if (a.cov.rows() != a.mean.size() || b.cov.rows() != b.mean.size()) {
        fail(Status::invalid_argument, "frechet_distance: covariance extent mismatch");
    }
    check_symmetric(a.cov, "frechet_distance (a)");
    check_symmetric(b.cov, "frechet_distance (b)");

    const Eigen::MatrixXd sqrt_a = psd_sqrt(a.cov);
    // Sa^{1/2} Sb Sa^{1/2} is symmetric PSD, unlike the raw product Sa Sb.
    const Eigen::MatrixXd inner = sqrt_a * b.cov * sqrt_a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (inner + inner.transpose()));
    if (eig.info() != Eigen::Success) fail(Status::numeric_error, "eigendecomposition failed");
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double lambda_max = ev.maxCoeff();
    const double floor_value = lambda_max > 0.0 ? 1e-9 * lambda_max : 0.0;
    double trace_sqrt = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > floor_value) trace_sqrt += std::sqrt(ev(i));
    }

    const double dist = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() -
                        2.0 * trace_sqrt;
    return std::max(dist, 0.0);
}

double joint_frechet_distance(const Eigen::Ref<const Eigen::MatrixXd>& src_a,
                              const Eigen::Ref<const Eigen::MatrixXd>& dst_a,
                              const Eigen::Ref<const Eigen::MatrixXd>& src_b,
                              const Eigen::Ref<const Eigen::MatrixXd>& dst_b) {
    if (src_a.rows() != dst_a.rows() || src_b.rows() != dst_b.rows()) {
        fail(Status::invalid_argument, "joint_frechet_distance: misaligned sample counts");
    }
    if (src_a.cols() != src_b.cols() || dst_a.cols() != dst_b.cols()) {
        fail(Status::invalid_argument, "joint_frechet_distance: feature dimensions differ");
    }
    auto joint = [](const Eigen::Ref<const Eigen::MatrixXd>& src,
                    const Eigen::Ref<const Eigen::MatrixXd>& dst) {
        Eigen::MatrixXd m(src.rows(), src.cols() + dst.cols());
        m << src, dst;
        return m;
    };
    return frechet_distance(summarize(joint(src_a, dst_a)), summarize(joint(src_b, dst_b)));
}

}  // namespace nvs::metrics
