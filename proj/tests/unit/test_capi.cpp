// Exercises the shared library strictly through its public C header, the
// way an external consumer (or the CLI) does.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nvsgeom/nvsgeom.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("version and error strings are always available") {
    CHECK(nvs_version() != nullptr);
    CHECK(std::strlen(nvs_version()) >= 5);
    CHECK(nvs_last_error() != nullptr);
}

TEST_CASE("null arguments yield NVS_ERR_INVALID_ARGUMENT with a message") {
    CHECK(nvs_relative_pose(nullptr, nullptr, nullptr) == NVS_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(nvs_last_error()) > 0);
    CHECK(nvs_tensor_load(nullptr, nullptr) == NVS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("relative pose and rotation helpers") {
    nvs_extrinsics src{}, dst{};
    for (int i = 0; i < 9; i += 4) src.rotation[i] = 1.0;  // identity
    double rot[9];
    REQUIRE(nvs_rotation_from_ypr(10.0, -4.0, 2.0, rot) == NVS_OK);
    std::memcpy(dst.rotation, rot, sizeof(rot));
    dst.translation[0] = 0.5;

    nvs_pose pose;
    REQUIRE(nvs_relative_pose(&src, &dst, &pose) == NVS_OK);
    for (int i = 0; i < 9; ++i) CHECK(pose.rotation[i] == doctest::Approx(rot[i]).epsilon(1e-12));
    CHECK(pose.translation[0] == doctest::Approx(0.5));

    nvs_pose inverse, identity;
    REQUIRE(nvs_pose_inverse(&pose, &inverse) == NVS_OK);
    REQUIRE(nvs_pose_compose(&inverse, &pose, &identity) == NVS_OK);
    CHECK(identity.rotation[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(identity.translation[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rejecting a bad rotation surfaces the degenerate status and message") {
    nvs_intrinsics k{100, 100, 50, 50, 100, 100};
    nvs_pose pure_rotation{};
    pure_rotation.rotation[0] = pure_rotation.rotation[4] = pure_rotation.rotation[8] = 1.0;
    double f[9];
    CHECK(nvs_fundamental_matrix(&k, &k, &pure_rotation, f) == NVS_ERR_DEGENERATE);
    CHECK(std::string(nvs_last_error()).find("rotation") != std::string::npos);
}

TEST_CASE("tensor lifecycle, file io, and data access") {
    const uint32_t dims[3] = {2, 3, 4};
    nvs_tensor* t = nullptr;
    REQUIRE(nvs_tensor_create(dims, 3, &t) == NVS_OK);
    CHECK(nvs_tensor_rank(t) == 3);
    CHECK(nvs_tensor_dim(t, 2) == 4);
    CHECK(nvs_tensor_size(t) == 24);
    float* data = nvs_tensor_data(t);
    for (int i = 0; i < 24; ++i) data[i] = static_cast<float>(i) * 0.5f;

    const std::string path = temp_path("nvsgeom_capi_tensor.nvst");
    REQUIRE(nvs_tensor_save(t, path.c_str()) == NVS_OK);
    nvs_tensor* back = nullptr;
    REQUIRE(nvs_tensor_load(path.c_str(), &back) == NVS_OK);
    CHECK(nvs_tensor_size(back) == 24);
    CHECK(std::memcmp(nvs_tensor_data_const(back), data, 24 * sizeof(float)) == 0);
    nvs_tensor_destroy(t);
    nvs_tensor_destroy(back);
    std::remove(path.c_str());
}

TEST_CASE("scene parsing, sampling, stats, and JSON through the C surface") {
    // Write a synthetic camera file.
    const std::string path = temp_path("nvsgeom_capi_scene.txt");
    {
        std::ofstream out(path);
        out << "https://example.com/demo\n";
        for (int i = 0; i < 40; ++i) {
            out << (1000 + i * 100) << " 0.6 0.9 0.5 0.5 0 0 "
                << "1 0 0 " << 0.05 * i << " 0 1 0 0 0 0 1 " << 0.02 * i << "\n";
        }
    }

    nvs_scene_list* scenes = nullptr;
    REQUIRE(nvs_scene_list_load_file(path.c_str(), "demo", &scenes) == NVS_OK);
    CHECK(nvs_scene_list_count(scenes) == 1);
    size_t frames = 0;
    REQUIRE(nvs_scene_list_frame_count(scenes, 0, &frames) == NVS_OK);
    CHECK(frames == 40);

    char* index_json = nullptr;
    REQUIRE(nvs_scene_list_index_json(scenes, &index_json) == NVS_OK);
    CHECK(std::string(index_json).find("\"demo\"") != std::string::npos);
    nvs_string_free(index_json);

    nvs_pair_list* pairs = nullptr;
    int with_replacement = -1;
    REQUIRE(nvs_sample_pairs(scenes, "train", 25, 256, 256, 99, &pairs, &with_replacement) ==
            NVS_OK);
    CHECK(with_replacement == 0);
    CHECK(nvs_pair_list_count(pairs) == 25);
    CHECK(std::string(nvs_pair_list_scene_id(pairs, 0)) == "demo");
    CHECK(std::string(nvs_pair_list_range(pairs, 0)) == "training");

    int64_t src = -1, dst = -1;
    REQUIRE(nvs_pair_list_indices(pairs, 0, &src, &dst) == NVS_OK);
    CHECK(src != dst);

    nvs_pose pose;
    nvs_intrinsics k_src, k_dst;
    REQUIRE(nvs_pair_list_geometry(pairs, 0, &pose, &k_src, &k_dst) == NVS_OK);
    CHECK(k_src.width == 256.0);
    CHECK(k_src.fx == doctest::Approx(0.6 * 256));

    nvs_embedding_stats stats;
    REQUIRE(nvs_compute_pose_stats(pairs, &stats) == NVS_OK);
    for (int i = 0; i < 20; ++i) CHECK(stats.std_dev[i] >= 1e-6);

    // JSON round trip preserves the pair count and geometry.
    char* pair_json = nullptr;
    REQUIRE(nvs_pair_list_to_json(pairs, &pair_json) == NVS_OK);
    nvs_pair_list* parsed = nullptr;
    REQUIRE(nvs_pair_list_from_json(pair_json, &parsed) == NVS_OK);
    CHECK(nvs_pair_list_count(parsed) == 25);
    nvs_string_free(pair_json);
    nvs_pair_list_destroy(parsed);

    // Same seed, same pairs.
    nvs_pair_list* again = nullptr;
    REQUIRE(nvs_sample_pairs(scenes, "train", 25, 256, 256, 99, &again, nullptr) == NVS_OK);
    char* json_a = nullptr;
    char* json_b = nullptr;
    REQUIRE(nvs_pair_list_to_json(pairs, &json_a) == NVS_OK);
    REQUIRE(nvs_pair_list_to_json(again, &json_b) == NVS_OK);
    CHECK(std::string(json_a) == std::string(json_b));
    nvs_string_free(json_a);
    nvs_string_free(json_b);
    nvs_pair_list_destroy(again);

    // A range no scene admits is a degenerate error.
    nvs_pair_list* none = nullptr;
    CHECK(nvs_sample_pairs(scenes, "long", 1, 256, 256, 1, &none, nullptr) == NVS_ERR_DEGENERATE);

    // Oversubscribing the unique-pair budget flips the replacement flag:
    // 40 frames admit 40 * 39 = 1560 distinct ordered training pairs.
    nvs_pair_list* oversubscribed = nullptr;
    int replaced = 0;
    REQUIRE(nvs_sample_pairs(scenes, "train", 1600, 256, 256, 3, &oversubscribed, &replaced) ==
            NVS_OK);
    CHECK(replaced == 1);
    CHECK(nvs_pair_list_count(oversubscribed) == 1600);
    nvs_pair_list_destroy(oversubscribed);

    nvs_pair_list_destroy(pairs);
    nvs_scene_list_destroy(scenes);
    std::remove(path.c_str());
}

TEST_CASE("epipolar chain through the C surface") {
    nvs_intrinsics k{256, 256, 128, 128, 256, 256};
    nvs_pose pose{};
    pose.rotation[0] = pose.rotation[4] = pose.rotation[8] = 1.0;
    pose.translation[0] = 1.0;

    double f[9];
    REQUIRE(nvs_fundamental_matrix(&k, &k, &pose, f) == NVS_OK);
    double norm = 0.0;
    for (double v : f) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));

    nvs_tensor* dist = nullptr;
    uint32_t degenerate = 99;
    REQUIRE(nvs_epipolar_distance_matrix(f, 8, 8, 8, 8, 256, 256, &dist, &degenerate) == NVS_OK);
    CHECK(degenerate == 0);
    CHECK(nvs_tensor_dim(dist, 0) == 64);
    CHECK(nvs_tensor_dim(dist, 1) == 64);

    const double m[2] = {0.0, 1.0};
    const double tau[2] = {0.0, 0.5};
    const double c[2] = {0.0, 2.0};
    const double b[2] = {0.0, -0.1};
    nvs_tensor* bias = nullptr;
    REQUIRE(nvs_attention_bias(dist, m, tau, c, b, 2, &bias) == NVS_OK);
    CHECK(nvs_tensor_dim(bias, 0) == 2);
    // Head 0 is the zero-initialized head.
    const float* data = nvs_tensor_data_const(bias);
    for (int i = 0; i < 64 * 64; ++i) CHECK(data[i] == 0.0f);

    nvs_tensor_destroy(bias);
    nvs_tensor_destroy(dist);
}

TEST_CASE("pose embedding and normalization through the C surface") {
    nvs_pose identity{};
    identity.rotation[0] = identity.rotation[4] = identity.rotation[8] = 1.0;
    nvs_intrinsics unit{1, 1, 0, 0, 0, 0};
    double e[20];
    REQUIRE(nvs_pose_embedding(&identity, &unit, &unit, e) == NVS_OK);
    const double expected[20] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0,
                                 1, 0, 1, 1, 0, 0, 1, 1, 0, 0};
    for (int i = 0; i < 20; ++i) CHECK(e[i] == expected[i]);

    nvs_embedding_stats stats;
    for (int i = 0; i < 20; ++i) {
        stats.mean[i] = e[i];
        stats.std_dev[i] = 2.0;
    }
    double normalized[20];
    REQUIRE(nvs_normalize_embedding(e, &stats, normalized) == NVS_OK);
    for (int i = 0; i < 20; ++i) CHECK(normalized[i] == 0.0);
}

TEST_CASE("image, augmentation, and psnr through the C surface") {
    // Smooth gradient image.
    std::vector<float> pixels(512 * 512 * 3);
    for (int r = 0; r < 512; ++r) {
        for (int c = 0; c < 512; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                pixels[(static_cast<size_t>(r) * 512 + c) * 3 + ch] =
                    0.2f + 0.3f * (static_cast<float>(r) / 512.0f) +
                    0.3f * (static_cast<float>(c) / 512.0f) + 0.05f * ch;
            }
        }
    }
    nvs_image* img = nullptr;
    REQUIRE(nvs_image_create(512, 512, pixels.data(), &img) == NVS_OK);

    nvs_rng* rng = nvs_rng_create(1234);
    REQUIRE(rng != nullptr);

    nvs_image *src = nullptr, *dst = nullptr;
    nvs_pose pose;
    nvs_intrinsics k;
    nvs_augment_info info;
    REQUIRE(nvs_augment_pair(img, rng, 128, &src, &dst, &pose, &k, &info) == NVS_OK);
    CHECK(nvs_image_width(src) == 128);
    CHECK(pose.translation[0] == 0.0);
    CHECK(pose.translation[1] == 0.0);
    CHECK(pose.translation[2] == 0.0);
    CHECK((info.regime == 0 || info.regime == 1));
    CHECK(info.attempts >= 1);

    const std::string png = temp_path("nvsgeom_capi_img.png");
    REQUIRE(nvs_image_save_png(src, png.c_str()) == NVS_OK);
    nvs_image* loaded = nullptr;
    REQUIRE(nvs_image_load_png(png.c_str(), &loaded) == NVS_OK);
    double db = 0.0;
    REQUIRE(nvs_psnr(src, loaded, &db) == NVS_OK);
    CHECK(db > 45.0);  // only 8-bit quantization noise

    nvs_image_destroy(loaded);
    nvs_image_destroy(src);
    nvs_image_destroy(dst);
    nvs_image_destroy(img);
    nvs_rng_destroy(rng);
    std::remove(png.c_str());
}

TEST_CASE("diffusion utilities through the C surface") {
    double sigmas[17];
    REQUIRE(nvs_sigma_schedule(16, 0.002, 80.0, 7.0, sigmas) == NVS_OK);
    CHECK(sigmas[0] == 80.0);
    CHECK(sigmas[15] == 0.002);
    CHECK(sigmas[16] == 0.0);

    nvs_tensor* samples = nullptr;
    REQUIRE(nvs_edm_sample_gaussian(16, 0.002, 80.0, 7.0, 0.25, 1.0, 8, 200, 7, &samples) ==
            NVS_OK);
    CHECK(nvs_tensor_dim(samples, 0) == 200);
    CHECK(nvs_tensor_dim(samples, 1) == 8);
    nvs_tensor_destroy(samples);

    nvs_rng* rng = nvs_rng_create(5);
    double sigma = 0.0;
    REQUIRE(nvs_sample_sigma(-0.8, 1.6, rng, &sigma) == NVS_OK);
    CHECK(sigma > 0.0);
    nvs_rng_destroy(rng);
}

TEST_CASE("frechet metrics through the C surface") {
    const uint32_t dims[2] = {64, 3};
    nvs_tensor* a = nullptr;
    REQUIRE(nvs_tensor_create(dims, 2, &a) == NVS_OK);
    float* data = nvs_tensor_data(a);
    nvs_rng* rng = nvs_rng_create(11);
    for (size_t i = 0; i < 64 * 3; ++i) data[i] = static_cast<float>(nvs_rng_normal(rng));

    double fd = -1.0;
    REQUIRE(nvs_frechet_distance(a, a, &fd) == NVS_OK);
    CHECK(fd < 1e-6);

    double jfd = -1.0;
    REQUIRE(nvs_joint_frechet_distance(a, a, a, a, &jfd) == NVS_OK);
    CHECK(jfd < 1e-6);

    nvs_rng_destroy(rng);
    nvs_tensor_destroy(a);
}

TEST_SUITE_END();
