#include "nvsgeom/epipolar.hpp"

#include "nvsgeom/common.hpp"
#include "nvsgeom/rng.hpp"

#include "support/helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace nvs;
using namespace nvs::epipolar;

TEST_SUITE_BEGIN("epipolar");

namespace {

struct RandomGeometry {
    CameraIntrinsics k_src;
    CameraIntrinsics k_dst;
    RelativePose pose;
};

RandomGeometry random_geometry(Rng& rng) {
    RandomGeometry g;
    g.k_src = testsupport::random_intrinsics(rng);
    g.k_dst = testsupport::random_intrinsics(rng);
    g.pose.rotation = testsupport::random_rotation(rng);
    do {
        g.pose.translation =
            Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    } while (g.pose.translation.norm() < 0.1);
    return g;
}

// Projects a source-camera point through both cameras; no visibility checks
// because the epipolar identity is projective.
std::pair<Eigen::Vector3d, Eigen::Vector3d> project_pair(const RandomGeometry& g,
                                                         const Eigen::Vector3d& x_src_cam) {
    const Eigen::Matrix3d k_src = camera::intrinsics_matrix(g.k_src);
    const Eigen::Matrix3d k_dst = camera::intrinsics_matrix(g.k_dst);
    const Eigen::Vector3d x_dst_cam = g.pose.rotation * x_src_cam + g.pose.translation;
    Eigen::Vector3d px_src = k_src * x_src_cam;
    Eigen::Vector3d px_dst = k_dst * x_dst_cam;
    px_src /= px_src.z();
    px_dst /= px_dst.z();
    return {px_src, px_dst};
}

}  // namespace

TEST_CASE("canonical stereo pair gives F proportional to [e1]x") {
    const CameraIntrinsics identity_k{1, 1, 0, 0, 0, 0};
    RelativePose pose;
    pose.translation = Eigen::Vector3d(1, 0, 0);
    const FundamentalMatrix f = fundamental_matrix(identity_k, identity_k, pose);

    Eigen::Matrix3d expected;
    expected << 0, 0, 0,
                0, 0, -1,
                0, 1, 0;
    expected /= expected.norm();
    CHECK(testsupport::max_abs_diff(f.m, expected) < 1e-12);
}

TEST_CASE("epipolar constraint holds for 200 projected points") {
    Rng rng(40);
    const RandomGeometry g = random_geometry(rng);
    const FundamentalMatrix f = fundamental_matrix(g.k_src, g.k_dst, g.pose);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d point(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 10));
        const auto [px_src, px_dst] = project_pair(g, point);
        CHECK(std::abs(px_dst.dot(f.m * px_src)) < 1e-6);
    }
}

TEST_CASE("swapping the views transposes F up to sign") {
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        const RandomGeometry g = random_geometry(rng);
        const FundamentalMatrix f = fundamental_matrix(g.k_src, g.k_dst, g.pose);
        const FundamentalMatrix back =
            fundamental_matrix(g.k_dst, g.k_src, camera::inverse(g.pose));
        const double diff_pos = testsupport::max_abs_diff(back.m, f.m.transpose());
        const double diff_neg = testsupport::max_abs_diff(back.m, (-f.m).transpose());
        CHECK(std::min(diff_pos, diff_neg) < 1e-12);
    }
}

TEST_CASE("pure rotation is rejected as degenerate") {
    Rng rng(42);
    RelativePose pose;
    pose.rotation = testsupport::random_rotation(rng);
    pose.translation = Eigen::Vector3d(1e-9, 0, 0);
    const CameraIntrinsics k{100, 100, 50, 50, 100, 100};
    try {
        fundamental_matrix(k, k, pose);
        FAIL("expected degenerate-geometry error");
    } catch (const Error& e) {
        CHECK(e.status() == Status::degenerate);
    }
}

TEST_CASE("rectified stereo: horizontal epipolar lines, zero distance on the own row") {
    const CameraIntrinsics identity_k{1, 1, 0, 0, 0, 0};
    RelativePose pose;
    pose.translation = Eigen::Vector3d(1, 0, 0);
    const FundamentalMatrix f = fundamental_matrix(identity_k, identity_k, pose);

    // Same grid on both sides: token s on the row of destination token d has
    // distance zero because lines are horizontal at the same y.
    const auto dm = epipolar_distance_matrix(f, {4, 4}, {4, 4}, 64, 64);
    CHECK(dm.degenerate_rows.empty());
    for (int di = 0; di < 4; ++di) {
        for (int dj = 0; dj < 4; ++dj) {
            for (int sj = 0; sj < 4; ++sj) {
                CHECK(dm.distances(di * 4 + dj, di * 4 + sj) < 1e-9);
            }
        }
    }
}

TEST_CASE("a source token exactly on the line has zero distance") {
    // 4x4 grids on a 64x64 image put token centers at (8 + 16j, 8 + 16i).
    // Build F = x_d l^T so the epipolar line of destination token (0, 0) is
    // exactly l, and choose l to pass through source token (i=1, j=2) at
    // pixel (40, 24): 1*40 + 2*24 - 88 = 0.
    const Eigen::Vector3d x_d(8.0, 8.0, 1.0);
    const Eigen::Vector3d line(1.0, 2.0, -88.0);
    const FundamentalMatrix f = FundamentalMatrix::from_matrix(x_d * line.transpose());
    const auto dm = epipolar_distance_matrix(f, {4, 4}, {4, 4}, 64, 64);
    CHECK(dm.distances(0, 1 * 4 + 2) < 1e-9);
}

TEST_CASE("distance matrix matches the double-loop oracle on 8x8 grids") {
    Rng rng(44);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomGeometry g = random_geometry(rng);
        const FundamentalMatrix f = fundamental_matrix(g.k_src, g.k_dst, g.pose);
        const int grid = 8, img_h = 256, img_w = 256;
        const auto dm = epipolar_distance_matrix(f, {grid, grid}, {grid, grid}, img_h, img_w);

        for (int di = 0; di < grid; ++di) {
            for (int dj = 0; dj < grid; ++dj) {
                const double xd = (dj + 0.5) * img_w / grid;
                const double yd = (di + 0.5) * img_h / grid;
                const Eigen::Vector3d line = f.m.transpose() * Eigen::Vector3d(xd, yd, 1.0);
                const double denom = std::sqrt(line.x() * line.x() + line.y() * line.y());
                for (int si = 0; si < grid; ++si) {
                    for (int sj = 0; sj < grid; ++sj) {
                        const double xs = (sj + 0.5) * img_w / grid;
                        const double ys = (si + 0.5) * img_h / grid;
                        const double expected =
                            std::abs(line.x() * xs + line.y() * ys + line.z()) / denom;
                        const double got = dm.distances(di * grid + dj, si * grid + sj);
                        CHECK(std::abs(got - expected) < 1e-9);
                        CHECK(got >= 0.0);
                        CHECK(std::isfinite(got));
                    }
                }
            }
        }
    }
}

TEST_CASE("degenerate epipolar lines fill their row with the sentinel") {
    // With only the last column of F nonzero, l = F' x = (0, 0, a x + b y + c)
    // for every destination point: no line direction at all.
    Eigen::Matrix3d raw = Eigen::Matrix3d::Zero();
    raw(0, 2) = 0.3;
    raw(1, 2) = 0.1;
    raw(2, 2) = 0.9;
    const FundamentalMatrix f = FundamentalMatrix::from_matrix(raw);
    const auto dm = epipolar_distance_matrix(f, {2, 2}, {3, 3}, 64, 64);
    CHECK(dm.degenerate_rows.size() == 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 9; ++c) CHECK(dm.distances(r, c) == kDegenerateDistance);
    }
}

TEST_CASE("attention bias analytic points") {
    EpipolarDistanceMatrix dm;
    dm.distances.resize(2, 3);
    dm.distances << 0.0, 1.0, 2.0,
                    3.0, 4.0, 5.0;

    SUBCASE("initialization (m=0, b=0) is exactly zero") {
        const auto bias = attention_bias(dm, {{0.0, 1.7, 3.0, 0.0}});
        CHECK((bias[0].array() == 0.0).all());
    }

    SUBCASE("hard cutoff limit") {
        const auto bias = attention_bias(dm, {{1.0, 1e6, 1.0, 0.0}});
        CHECK(bias[0](0, 0) == doctest::Approx(1.0).epsilon(1e-12));  // D=0 < c=1
        CHECK(bias[0](0, 2) == doctest::Approx(0.0).epsilon(1e-12));  // D=2 > c=1
    }

    SUBCASE("m=2, tau=1, c=0, b=-1 at D=0 gives exactly 0") {
        const auto bias = attention_bias(dm, {{2.0, 1.0, 0.0, -1.0}});
        CHECK(bias[0](0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("m=0 with bias beta is beta everywhere") {
        const auto bias = attention_bias(dm, {{0.0, 2.0, 1.0, 0.75}});
        CHECK((bias[0].array() == 0.75).all());
    }

    SUBCASE("monotone non-increasing in D for m>0, tau>0") {
        // The fixture rows are sorted by increasing distance, so the bias
        // must be non-increasing along them for any positive m and tau.
        Rng rng(49);
        for (int trial = 0; trial < 50; ++trial) {
            const EpipolarMixParams p{rng.uniform(0.01, 5.0), rng.uniform(0.01, 5.0),
                                      rng.uniform(-3, 3), rng.uniform(-2, 2)};
            const auto bias = attention_bias(dm, {p});
            for (int r = 0; r < 2; ++r) {
                for (int c = 1; c < 3; ++c) CHECK(bias[0](r, c - 1) >= bias[0](r, c));
            }
        }
    }

    SUBCASE("one bias matrix per head") {
        const auto bias = attention_bias(dm, {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 0.5, 1, -0.2}});
        CHECK(bias.size() == 3);
        CHECK(bias[0].rows() == 2);
        CHECK(bias[0].cols() == 3);
    }
}

namespace {

Eigen::MatrixXd random_tokens(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-1, 1);
    return m;
}

}  // namespace

TEST_CASE("joint attention: zero bias equals no bias") {
    Rng rng(45);
    const int n_dst = 5, n_src = 7, dim = 8, heads = 2;
    const auto q = random_tokens(rng, n_dst, dim);
    const auto kd = random_tokens(rng, n_dst, dim);
    const auto vd = random_tokens(rng, n_dst, dim);
    const auto ks = random_tokens(rng, n_src, dim);
    const auto vs = random_tokens(rng, n_src, dim);

    std::vector<Eigen::MatrixXd> zero_bias(heads, Eigen::MatrixXd::Zero(n_dst, n_src));
    const auto with = joint_attention(q, kd, vd, ks, vs, &zero_bias, heads);
    const auto without = joint_attention(q, kd, vd, ks, vs, nullptr, heads);
    CHECK(testsupport::max_abs_diff(with.output, without.output) < 1e-9);
}

TEST_CASE("joint attention: large negative bias masks the source block") {
    Rng rng(46);
    const int n_dst = 4, n_src = 6, dim = 6, heads = 1;
    const auto q = random_tokens(rng, n_dst, dim);
    const auto kd = random_tokens(rng, n_dst, dim);
    const auto vd = random_tokens(rng, n_dst, dim);
    const auto ks = random_tokens(rng, n_src, dim);
    const auto vs = random_tokens(rng, n_src, dim);

    std::vector<Eigen::MatrixXd> mask(heads, Eigen::MatrixXd::Constant(n_dst, n_src, -1e9));
    const auto masked = joint_attention(q, kd, vd, ks, vs, &mask, heads);

    // Pure self-attention: reuse the joint machinery with the destination
    // stream playing both roles is not available, so compute it directly.
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Eigen::MatrixXd logits = (q * kd.transpose()) * scale;
    for (int r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        logits.row(r) = (logits.row(r).array() - mx).exp();
        logits.row(r) /= logits.row(r).sum();
    }
    const Eigen::MatrixXd self_only = logits * vd;
    CHECK(testsupport::max_abs_diff(masked.output, self_only) < 1e-6);
}

TEST_CASE("joint attention matches a hand-computed 2x2 example") {
    // 1 head, 2 destination tokens, 2 source tokens, dim 2.
    Eigen::MatrixXd q(2, 2), kd(2, 2), vd(2, 2), ks(2, 2), vs(2, 2);
    q << 1, 0,
         0, 1;
    kd << 1, 0,
          0, 1;
    vd << 1, 2,
          3, 4;
    ks << 1, 1,
          0, -1;
    vs << 5, 6,
          7, 8;

    const auto result = joint_attention(q, kd, vd, ks, vs, nullptr, 1);

    // Oracle: explicit softmax over the 4 keys per query at scale 1/sqrt(2).
    const double s = 1.0 / std::sqrt(2.0);
    for (int row = 0; row < 2; ++row) {
        const Eigen::Vector2d query = q.row(row).transpose();
        double logits[4] = {s * query.dot(kd.row(0)), s * query.dot(kd.row(1)),
                            s * query.dot(ks.row(0)), s * query.dot(ks.row(1))};
        double mx = *std::max_element(logits, logits + 4);
        double sum = 0.0;
        double weights[4];
        for (int i = 0; i < 4; ++i) {
            weights[i] = std::exp(logits[i] - mx);
            sum += weights[i];
        }
        Eigen::Vector2d expected = Eigen::Vector2d::Zero();
        const Eigen::MatrixXd values[4] = {vd.row(0), vd.row(1), vs.row(0), vs.row(1)};
        for (int i = 0; i < 4; ++i) expected += (weights[i] / sum) * values[i].transpose();
        CHECK((result.output.row(row).transpose() - expected).norm() < 1e-9);
    }
}

TEST_CASE("joint attention rows sum to one and cross weights stay positive") {
    Rng rng(47);
    const int n_dst = 6, n_src = 5, dim = 12, heads = 3;
    const auto q = random_tokens(rng, n_dst, dim);
    const auto kd = random_tokens(rng, n_dst, dim);
    const auto vd = random_tokens(rng, n_dst, dim);
    const auto ks = random_tokens(rng, n_src, dim);
    const auto vs = random_tokens(rng, n_src, dim);

    std::vector<Eigen::MatrixXd> bias;
    for (int h = 0; h < heads; ++h) {
        Eigen::MatrixXd b(n_dst, n_src);
        for (int r = 0; r < n_dst; ++r)
            for (int c = 0; c < n_src; ++c) b(r, c) = rng.uniform(-100, 100);
        bias.push_back(std::move(b));
    }

    const auto result = joint_attention(q, kd, vd, ks, vs, &bias, heads);
    REQUIRE(result.attention.size() == heads);
    for (const Eigen::MatrixXd& attn : result.attention) {
        for (int r = 0; r < attn.rows(); ++r) {
            CHECK(std::abs(attn.row(r).sum() - 1.0) < 1e-9);
            // Additive bias never zeroes a correlation outright.
            for (int c = n_dst; c < attn.cols(); ++c) CHECK(attn(r, c) > 0.0);
        }
    }
}

TEST_CASE("joint attention rejects bad shapes") {
    Rng rng(48);
    const auto q = random_tokens(rng, 4, 8);
    const auto kd = random_tokens(rng, 4, 8);
    const auto vd = random_tokens(rng, 4, 8);
    const auto ks = random_tokens(rng, 3, 8);
    const auto vs = random_tokens(rng, 3, 8);

    CHECK_THROWS_AS(joint_attention(q, kd, vd, ks, vs, nullptr, 3), Error);  // 8 % 3 != 0
    const auto vs_bad = random_tokens(rng, 2, 8);
    CHECK_THROWS_AS(joint_attention(q, kd, vd, ks, vs_bad, nullptr, 2), Error);
    std::vector<Eigen::MatrixXd> bias(1, Eigen::MatrixXd::Zero(4, 4));  // wrong cols
    CHECK_THROWS_AS(joint_attention(q, kd, vd, ks, vs, &bias, 2), Error);
}

TEST_SUITE_END();
