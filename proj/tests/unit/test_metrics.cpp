#include "nvsgeom/metrics.hpp"

#include "nvsgeom/common.hpp"
#include "nvsgeom/rng.hpp"

#include "support/helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace nvs;
using namespace nvs::metrics;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("psnr: identical images return the infinity sentinel") {
    Rng rng(80);
    const ImageBuffer img = testsupport::synthetic_photo(rng, 32);
    CHECK(std::isinf(psnr(img, img)));
}

TEST_CASE("psnr: a uniform 0.1 offset gives 20 dB") {
    Rng rng(81);
    ImageBuffer a(16, 16);
    for (float& v : a.data) v = static_cast<float>(rng.uniform(0.0, 0.85));
    ImageBuffer b = a;
    for (float& v : b.data) v += 0.1f;
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("psnr matches a naive double-loop reference") {
    Rng rng(82);
    const ImageBuffer a = testsupport::synthetic_photo(rng, 24);
    const ImageBuffer b = testsupport::synthetic_photo(rng, 24);

    double sum = 0.0;
    for (int r = 0; r < 24; ++r) {
        for (int c = 0; c < 24; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const double d = static_cast<double>(a.at(r, c, ch)) - b.at(r, c, ch);
                sum += d * d;
            }
        }
    }
    const double expected = 10.0 * std::log10(1.0 / (sum / (24.0 * 24.0 * 3.0)));
    CHECK(psnr(a, b) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("psnr rejects shape mismatches") {
    CHECK_THROWS_AS(psnr(ImageBuffer(4, 4), ImageBuffer(4, 5)), Error);
}

TEST_CASE("summarize: the two-point set v, -v") {
    Eigen::MatrixXd features(2, 3);
    features << 1.0, -2.0, 0.5,
                -1.0, 2.0, -0.5;
    const GaussianSummary s = summarize(features);
    CHECK(s.mean.norm() == 0.0);
    // Sample covariance with 1/(n-1) = 1: cov = 2 v v^T.
    const Eigen::Vector3d v(1.0, -2.0, 0.5);
    CHECK(testsupport::max_abs_diff(s.cov, 2.0 * v * v.transpose()) < 1e-12);
}

TEST_CASE("summarize recovers known Gaussian moments (Monte Carlo)") {
    Rng rng(83);
    const int n = 100000, d = 4;
    Eigen::VectorXd mu(d);
    mu << 1.0, -0.5, 0.25, 2.0;
    Eigen::VectorXd scale(d);
    scale << 0.5, 1.0, 2.0, 0.25;

    Eigen::MatrixXd features(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) features(i, j) = mu(j) + scale(j) * rng.normal();
    }
    const GaussianSummary s = summarize(features);
    for (int j = 0; j < d; ++j) {
        const double se_mean = scale(j) / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(s.mean(j) - mu(j)) < 3.0 * se_mean);
        const double var = scale(j) * scale(j);
        const double se_var = var * std::sqrt(2.0 / n);
        CHECK(std::abs(s.cov(j, j) - var) < 3.0 * se_var);
    }
}

TEST_CASE("streaming accumulation equals the two-pass reference") {
    Rng rng(84);
    const int n = 5000, d = 6;
    Eigen::MatrixXd features(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) features(i, j) = rng.uniform(-4, 4) + 100.0;  // offset stresses stability
    }
    const GaussianSummary streaming = summarize(features);

    // Two-pass reference.
    const Eigen::VectorXd mean = features.colwise().mean();
    Eigen::MatrixXd centered = features.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

    CHECK((streaming.mean - mean).cwiseAbs().maxCoeff() < 1e-9 * 100.0);
    CHECK(testsupport::max_abs_diff(streaming.cov, cov) <
          1e-9 * std::max(1.0, cov.cwiseAbs().maxCoeff()));
}

TEST_CASE("parallel partial accumulation merges exactly") {
    Rng rng(85);
    const int n = 3000, d = 5;
    Eigen::MatrixXd features(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) features(i, j) = rng.normal();
    }

    FeatureAccumulator whole(d);
    for (int i = 0; i < n; ++i) whole.add(features.row(i).transpose());

    FeatureAccumulator left(d), middle(d), right(d);
    for (int i = 0; i < 1000; ++i) left.add(features.row(i).transpose());
    for (int i = 1000; i < 1700; ++i) middle.add(features.row(i).transpose());
    for (int i = 1700; i < n; ++i) right.add(features.row(i).transpose());
    left.merge(middle);
    left.merge(right);

    const GaussianSummary a = whole.finalize();
    const GaussianSummary b = left.finalize();
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(testsupport::max_abs_diff(a.cov, b.cov) < 1e-12);
}

TEST_CASE("summarize needs at least two samples") {
    CHECK_THROWS_AS(summarize(Eigen::MatrixXd::Zero(1, 3)), Error);
}

TEST_CASE("frechet distance of identical summaries is zero") {
    Rng rng(86);
    Eigen::MatrixXd features(200, 5);
    for (int i = 0; i < 200; ++i) {
        for (int j = 0; j < 5; ++j) features(i, j) = rng.normal();
    }
    const GaussianSummary s = summarize(features);
    CHECK(frechet_distance(s, s) < 1e-6);
}

TEST_CASE("frechet distance: 1-D closed form") {
    // N(0, s1^2) vs N(m, s2^2): distance m^2 + (s1 - s2)^2.
    GaussianSummary a, b;
    a.mean = Eigen::VectorXd::Zero(1);
    a.cov = Eigen::MatrixXd::Constant(1, 1, 2.25);  // s1 = 1.5
    b.mean = Eigen::VectorXd::Constant(1, 0.75);
    b.cov = Eigen::MatrixXd::Constant(1, 1, 0.49);  // s2 = 0.7
    const double expected = 0.75 * 0.75 + (1.5 - 0.7) * (1.5 - 0.7);
    CHECK(frechet_distance(a, b) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("frechet distance: commuting diagonal covariances") {
    const int d = 6;
    Rng rng(87);
    GaussianSummary a, b;
    a.mean = Eigen::VectorXd::Zero(d);
    b.mean = Eigen::VectorXd::Zero(d);
    a.cov = Eigen::MatrixXd::Zero(d, d);
    b.cov = Eigen::MatrixXd::Zero(d, d);
    double expected = 0.0;
    for (int j = 0; j < d; ++j) {
        const double p = rng.uniform(0.1, 3.0);
        const double q = rng.uniform(0.1, 3.0);
        a.cov(j, j) = p;
        b.cov(j, j) = q;
        a.mean(j) = rng.uniform(-1, 1);
        b.mean(j) = rng.uniform(-1, 1);
        const double dm = a.mean(j) - b.mean(j);
        expected += dm * dm + (std::sqrt(p) - std::sqrt(q)) * (std::sqrt(p) - std::sqrt(q));
    }
    CHECK(frechet_distance(a, b) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("frechet distance is symmetric") {
    Rng rng(88);
    Eigen::MatrixXd fa(500, 4), fb(500, 4);
    for (int i = 0; i < 500; ++i) {
        for (int j = 0; j < 4; ++j) {
            fa(i, j) = rng.normal() * (j + 1);
            fb(i, j) = rng.normal() + 0.3 * j;
        }
    }
    const GaussianSummary a = summarize(fa);
    const GaussianSummary b = summarize(fb);
    CHECK(frechet_distance(a, b) == doctest::Approx(frechet_distance(b, a)).epsilon(1e-6));
}

TEST_CASE("frechet distance is invariant under joint orthogonal rotation") {
    Rng rng(89);
    const int d = 4;
    Eigen::MatrixXd fa(400, d), fb(400, d);
    for (int i = 0; i < 400; ++i) {
        for (int j = 0; j < d; ++j) {
            fa(i, j) = rng.normal();
            fb(i, j) = 0.5 * rng.normal() + 0.2;
        }
    }
    const double base = frechet_distance(summarize(fa), summarize(fb));

    // Random orthogonal matrix from QR of a Gaussian matrix.
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const double rotated =
        frechet_distance(summarize(fa * q.transpose()), summarize(fb * q.transpose()));
    CHECK(rotated == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("frechet distance rejects asymmetric covariance") {
    GaussianSummary a, b;
    a.mean = b.mean = Eigen::VectorXd::Zero(2);
    a.cov = Eigen::MatrixXd::Identity(2, 2);
    b.cov = Eigen::MatrixXd::Identity(2, 2);
    b.cov(0, 1) = 0.5;  // not mirrored
    CHECK_THROWS_AS(frechet_distance(a, b), Error);
}

TEST_CASE("joint frechet: identical paired sets give zero") {
    Rng rng(90);
    Eigen::MatrixXd src(300, 3), dst(300, 3);
    for (int i = 0; i < 300; ++i) {
        for (int j = 0; j < 3; ++j) {
            src(i, j) = rng.normal();
            dst(i, j) = rng.normal();
        }
    }
    CHECK(joint_frechet_distance(src, dst, src, dst) < 1e-6);
}

TEST_CASE("joint frechet detects a broken pairing that marginals miss") {
    Rng rng(91);
    const int n = 100000, d = 4;
    Eigen::MatrixXd src(n, d), dst(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            src(i, j) = rng.normal();
            dst(i, j) = src(i, j) + 0.3 * rng.normal();  // strongly correlated pairing
        }
    }
    // Permute the destination rows (cyclic shift breaks every pairing).
    Eigen::MatrixXd permuted(n, d);
    for (int i = 0; i < n; ++i) permuted.row(i) = dst.row((i + 1) % n);

    const double marginal = frechet_distance(summarize(dst), summarize(permuted));
    const double joint = joint_frechet_distance(src, dst, src, permuted);
    CHECK(marginal < 1e-3);  // identical sets as sets
    CHECK(joint > 0.1);      // the pairing structure differs
}

TEST_CASE("joint frechet with independent identical marginals shrinks with n") {
    Rng rng(92);
    const int n = 100000, d = 4;
    Eigen::MatrixXd src_a(n, d), dst_a(n, d), src_b(n, d), dst_b(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            src_a(i, j) = rng.normal();
            dst_a(i, j) = rng.normal();
            src_b(i, j) = rng.normal();
            dst_b(i, j) = rng.normal();
        }
    }
    CHECK(joint_frechet_distance(src_a, dst_a, src_b, dst_b) < 0.05);
}

TEST_CASE("joint frechet validates alignment") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(10, 2);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(9, 2);
    CHECK_THROWS_AS(joint_frechet_distance(a, b, a, a), Error);
}

TEST_SUITE_END();
