#include "nvsgeom/nvsgeom.h"

#include "nvsgeom/camera.hpp"
#include "nvsgeom/common.hpp"
#include "nvsgeom/dataset.hpp"
#include "nvsgeom/diffusion.hpp"
#include "nvsgeom/encoding.hpp"
#include "nvsgeom/epipolar.hpp"
#include "nvsgeom/homoaug.hpp"
#include "nvsgeom/image.hpp"
#include "nvsgeom/image_io.hpp"
#include "nvsgeom/metrics.hpp"
#include "nvsgeom/rng.hpp"
#include "nvsgeom/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using nvs::Error;
using nvs::Status;

namespace {

thread_local std::string g_last_error = "no error";

nvs_status to_c_status(Status s) {
    return static_cast<nvs_status>(static_cast<int>(s));
}

/* Runs the body, translating exceptions into status codes. */
template <typename Fn>
nvs_status guarded(Fn&& fn) {
    try {
        fn();
        return NVS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_c_status(e.status());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NVS_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown error";
        return NVS_ERR_NUMERIC;
    }
}

nvs_status arg_error(const char* what) {
    g_last_error = what;
    return NVS_ERR_INVALID_ARGUMENT;
}

nvs::CameraIntrinsics from_c(const nvs_intrinsics& k) {
    return {k.fx, k.fy, k.cx, k.cy, k.width, k.height};
}

nvs_intrinsics to_c(const nvs::CameraIntrinsics& k) {
    return {k.fx, k.fy, k.cx, k.cy, k.width, k.height};
}

Eigen::Matrix3d matrix_from_row_major(const double m[9]) {
    Eigen::Matrix3d out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out(r, c) = m[r * 3 + c];
    return out;
}

void matrix_to_row_major(const Eigen::Matrix3d& m, double out[9]) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[r * 3 + c] = m(r, c);
}

nvs::RelativePose pose_from_c(const nvs_pose& p) {
    nvs::RelativePose out;
    out.rotation = matrix_from_row_major(p.rotation);
    for (int i = 0; i < 3; ++i) out.translation(i) = p.translation[i];
    return out;
}

nvs_pose pose_to_c(const nvs::RelativePose& p) {
    nvs_pose out;
    matrix_to_row_major(p.rotation, out.rotation);
    for (int i = 0; i < 3; ++i) out.translation[i] = p.translation(i);
    return out;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct nvs_rng {
    nvs::Rng rng;
};

struct nvs_tensor {
    nvs::Tensor t;
};

struct nvs_image {
    nvs::ImageBuffer img;
};

struct nvs_scene_list {
    std::vector<nvs::dataset::SceneManifest> scenes;
    std::vector<std::string> paths;  // parallel to scenes; empty string if unknown
};

struct nvs_pair_list {
    std::vector<nvs::dataset::PairSample> pairs;
    std::vector<std::string> range_names;  // cached c_str storage
};

namespace {

nvs_pair_list* wrap_pairs(std::vector<nvs::dataset::PairSample> pairs) {
    auto* list = new nvs_pair_list{std::move(pairs), {}};
    list->range_names.reserve(list->pairs.size());
    for (const auto& p : list->pairs) {
        list->range_names.emplace_back(nvs::dataset::to_string(p.range_label));
    }
    return list;
}

Eigen::MatrixXd matrix_from_tensor(const nvs::Tensor& t, const char* what) {
    if (t.rank() != 2) nvs::fail(Status::invalid_argument, std::string(what) + ": expected rank 2");
    Eigen::MatrixXd m(t.dims[0], t.dims[1]);
    for (uint32_t r = 0; r < t.dims[0]; ++r) {
        for (uint32_t c = 0; c < t.dims[1]; ++c) {
            m(r, c) = t.data[static_cast<size_t>(r) * t.dims[1] + c];
        }
    }
    return m;
}

Eigen::MatrixXd features_from_tensor(const nvs::Tensor& t, const char* what) {
    if (t.rank() != 2) {
        nvs::fail(Status::invalid_argument, std::string(what) + ": features must be (n, d)");
    }
    return matrix_from_tensor(t, what);
}

nvs::encoding::DepthMap depth_from_tensor(const nvs::Tensor& t) {
    if (t.rank() != 2) nvs::fail(Status::invalid_argument, "depth tensor must have shape (H, W)");
    nvs::encoding::DepthMap d(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
    for (size_t i = 0; i < t.data.size(); ++i) d.data[i] = t.data[i];
    return d;
}

nvs_tensor* grid_to_tensor(const nvs::encoding::CoordinateGrid& grid) {
    nvs::Tensor t(std::vector<uint32_t>{static_cast<uint32_t>(grid.height),
                                        static_cast<uint32_t>(grid.width), 2u});
    for (size_t i = 0; i < grid.data.size(); ++i) t.data[i] = static_cast<float>(grid.data[i]);
    return new nvs_tensor{std::move(t)};
}

}  // namespace

extern "C" {

const char* nvs_version(void) {
    return nvs::version_string();
}

const char* nvs_last_error(void) {
    return g_last_error.c_str();
}

void nvs_string_free(char* s) {
    std::free(s);
}

/* --- camera ------------------------------------------------------------ */

nvs_status nvs_relative_pose(const nvs_extrinsics* src, const nvs_extrinsics* dst, nvs_pose* out) {
    if (!src || !dst || !out) return arg_error("nvs_relative_pose: null argument");
    return guarded([&] {
        nvs::CameraExtrinsics a, b;
        a.rotation = matrix_from_row_major(src->rotation);
        b.rotation = matrix_from_row_major(dst->rotation);
        for (int i = 0; i < 3; ++i) {
            a.translation(i) = src->translation[i];
            b.translation(i) = dst->translation[i];
        }
        *out = pose_to_c(nvs::camera::relative_pose(a, b));
    });
}

nvs_status nvs_pose_inverse(const nvs_pose* pose, nvs_pose* out) {
    if (!pose || !out) return arg_error("nvs_pose_inverse: null argument");
    return guarded([&] { *out = pose_to_c(nvs::camera::inverse(pose_from_c(*pose))); });
}

nvs_status nvs_pose_compose(const nvs_pose* second, const nvs_pose* first, nvs_pose* out) {
    if (!second || !first || !out) return arg_error("nvs_pose_compose: null argument");
    return guarded([&] {
        *out = pose_to_c(nvs::camera::compose(pose_from_c(*second), pose_from_c(*first)));
    });
}

nvs_status nvs_intrinsics_matrix(const nvs_intrinsics* k, double out[9]) {
    if (!k || !out) return arg_error("nvs_intrinsics_matrix: null argument");
    return guarded([&] { matrix_to_row_major(nvs::camera::intrinsics_matrix(from_c(*k)), out); });
}

nvs_status nvs_rescale_intrinsics(const nvs_intrinsics* k, double factor, nvs_intrinsics* out) {
    if (!k || !out) return arg_error("nvs_rescale_intrinsics: null argument");
    return guarded([&] { *out = to_c(nvs::camera::rescale_intrinsics(from_c(*k), factor)); });
}

nvs_status nvs_rotation_from_ypr(double yaw_deg, double pitch_deg, double roll_deg, double out[9]) {
    if (!out) return arg_error("nvs_rotation_from_ypr: null output");
    return guarded([&] {
        matrix_to_row_major(nvs::camera::rotation_from_ypr(yaw_deg, pitch_deg, roll_deg), out);
    });
}

/* --- rng ----------------------------------------------------------------- */

nvs_rng* nvs_rng_create(uint64_t seed) {
    return new (std::nothrow) nvs_rng{nvs::Rng(seed)};
}

void nvs_rng_destroy(nvs_rng* rng) {
    delete rng;
}

uint64_t nvs_rng_derive(uint64_t seed, uint64_t index) {
    return nvs::Rng::derive(seed, index);
}

uint64_t nvs_rng_next(nvs_rng* rng) {
    return rng ? rng->rng.next_u64() : 0;
}

double nvs_rng_uniform(nvs_rng* rng) {
    return rng ? rng->rng.uniform() : 0.0;
}

double nvs_rng_normal(nvs_rng* rng) {
    return rng ? rng->rng.normal() : 0.0;
}

/* --- tensor -------------------------------------------------------------- */

nvs_status nvs_tensor_create(const uint32_t* dims, size_t ndim, nvs_tensor** out) {
    if (!dims || !out || ndim == 0) return arg_error("nvs_tensor_create: null/empty dims");
    return guarded([&] {
        *out = new nvs_tensor{nvs::Tensor(std::vector<uint32_t>(dims, dims + ndim))};
    });
}

void nvs_tensor_destroy(nvs_tensor* t) {
    delete t;
}

size_t nvs_tensor_rank(const nvs_tensor* t) {
    return t ? t->t.rank() : 0;
}

uint32_t nvs_tensor_dim(const nvs_tensor* t, size_t axis) {
    return (t && axis < t->t.dims.size()) ? t->t.dims[axis] : 0;
}

size_t nvs_tensor_size(const nvs_tensor* t) {
    return t ? t->t.size() : 0;
}

float* nvs_tensor_data(nvs_tensor* t) {
    return t ? t->t.data.data() : nullptr;
}

const float* nvs_tensor_data_const(const nvs_tensor* t) {
    return t ? t->t.data.data() : nullptr;
}

nvs_status nvs_tensor_save(const nvs_tensor* t, const char* path) {
    if (!t || !path) return arg_error("nvs_tensor_save: null argument");
    return guarded([&] { t->t.save(path); });
}

nvs_status nvs_tensor_load(const char* path, nvs_tensor** out) {
    if (!path || !out) return arg_error("nvs_tensor_load: null argument");
    return guarded([&] { *out = new nvs_tensor{nvs::Tensor::load(path)}; });
}

/* --- scenes -------------------------------------------------------------- */

nvs_status nvs_scene_list_load_file(const char* path, const char* scene_id, nvs_scene_list** out) {
    if (!path || !scene_id || !out) return arg_error("nvs_scene_list_load_file: null argument");
    return guarded([&] {
        auto list = std::make_unique<nvs_scene_list>();
        list->scenes.push_back(nvs::dataset::load_camera_file(path, scene_id));
        list->paths.emplace_back(path);
        *out = list.release();
    });
}

nvs_status nvs_scene_list_load_dir(const char* dir, int skip_bad, nvs_scene_list** out,
                                   size_t* n_skipped) {
    if (!dir || !out) return arg_error("nvs_scene_list_load_dir: null argument");
    return guarded([&] {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) {
            nvs::fail(Status::io_error, std::string("not a directory: ") + dir);
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());

        auto list = std::make_unique<nvs_scene_list>();
        size_t skipped = 0;
        for (const fs::path& p : files) {
            try {
                list->scenes.push_back(nvs::dataset::load_camera_file(p.string(), p.stem().string()));
                list->paths.push_back(p.string());
            } catch (const Error& e) {
                if (!skip_bad) throw;
                NVS_LOG_WARN("skipping '%s': %s", p.string().c_str(), e.what());
                ++skipped;
            }
        }
        if (n_skipped) *n_skipped = skipped;
        *out = list.release();
    });
}

nvs_status nvs_scene_list_load_index(const char* index_json_path, nvs_scene_list** out) {
    if (!index_json_path || !out) return arg_error("nvs_scene_list_load_index: null argument");
    return guarded([&] {
        std::ifstream in(index_json_path, std::ios::binary);
        if (!in) nvs::fail(Status::io_error, std::string("cannot open: ") + index_json_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto entries = nvs::dataset::scene_index_from_json(buf.str());
        auto list = std::make_unique<nvs_scene_list>();
        for (const auto& e : entries) {
            list->scenes.push_back(nvs::dataset::load_camera_file(e.path, e.scene_id));
            list->paths.push_back(e.path);
        }
        *out = list.release();
    });
}

void nvs_scene_list_destroy(nvs_scene_list* scenes) {
    delete scenes;
}

size_t nvs_scene_list_count(const nvs_scene_list* scenes) {
    return scenes ? scenes->scenes.size() : 0;
}

nvs_status nvs_scene_list_frame_count(const nvs_scene_list* scenes, size_t scene, size_t* out) {
    if (!scenes || !out || scene >= scenes->scenes.size()) {
        return arg_error("nvs_scene_list_frame_count: bad argument");
    }
    *out = scenes->scenes[scene].frames.size();
    return NVS_OK;
}

nvs_status nvs_scene_list_normalize_scale(nvs_scene_list* scenes, size_t* n_skipped) {
    if (!scenes) return arg_error("nvs_scene_list_normalize_scale: null argument");
    return guarded([&] {
        auto result = nvs::camera::normalize_scene_scale(scenes->scenes);
        scenes->scenes = std::move(result.scenes);
        if (n_skipped) *n_skipped = result.skipped.size();
    });
}

nvs_status nvs_scene_list_index_json(const nvs_scene_list* scenes, char** out_json) {
    if (!scenes || !out_json) return arg_error("nvs_scene_list_index_json: null argument");
    return guarded([&] {
        std::vector<nvs::dataset::SceneIndexEntry> entries;
        for (size_t i = 0; i < scenes->scenes.size(); ++i) {
            entries.push_back(nvs::dataset::index_entry(scenes->scenes[i], scenes->paths[i]));
        }
        *out_json = dup_string(nvs::dataset::scene_index_to_json(entries));
    });
}

/* --- pair sampling -------------------------------------------------------- */

nvs_status nvs_sample_pairs(const nvs_scene_list* scenes, const char* range, size_t count,
                            double width, double height, uint64_t seed, nvs_pair_list** out,
                            int* with_replacement) {
    if (!scenes || !range || !out || count == 0) {
        return arg_error("nvs_sample_pairs: bad argument");
    }
    return guarded([&] {
        using namespace nvs::dataset;
        const RangeLabel label = range_label_from_string(range);

        // Eligible scenes and the number of distinct ordered pairs they admit.
        std::vector<size_t> eligible;
        size_t unique_total = 0;
        for (size_t i = 0; i < scenes->scenes.size(); ++i) {
            const SceneManifest& scene = scenes->scenes[i];
            size_t scene_pairs = 0;
            if (label == RangeLabel::training) {
                const size_t n = scene.frames.size();
                if (n >= 2) scene_pairs = n * (n - 1);
            } else {
                for (int src : eval_sources(scene, label)) {
                    scene_pairs += eval_destinations(scene, label, src).size();
                }
            }
            if (scene_pairs > 0) {
                eligible.push_back(i);
                unique_total += scene_pairs;
            }
        }
        if (eligible.empty()) {
            nvs::fail(Status::degenerate,
                      std::string("no scene admits the '") + range + "' range");
        }

        const bool replacement = count > unique_total;
        if (replacement) {
            NVS_LOG_WARN("requested %zu pairs but only %zu unique pairs exist; "
                         "sampling with replacement",
                         count, unique_total);
        }
        if (with_replacement) *with_replacement = replacement ? 1 : 0;

        nvs::Rng rng(seed);
        std::vector<PairSample> pairs;
        std::set<std::tuple<size_t, int, int>> seen;
        while (pairs.size() < count) {
            const size_t scene_idx = eligible[rng.uniform_below(eligible.size())];
            const SceneManifest& scene = scenes->scenes[scene_idx];
            std::optional<PairSample> pair;
            if (label == RangeLabel::training) {
                pair = sample_training_pair(scene, rng, width, height);
            } else {
                pair = sample_eval_pair(scene, label, rng, width, height);
            }
            if (!pair) continue;
            if (!replacement) {
                auto key = std::make_tuple(scene_idx, pair->src_index, pair->dst_index);
                if (!seen.insert(key).second) continue;
            }
            pairs.push_back(std::move(*pair));
        }
        *out = wrap_pairs(std::move(pairs));
    });
}

void nvs_pair_list_destroy(nvs_pair_list* pairs) {
    delete pairs;
}

size_t nvs_pair_list_count(const nvs_pair_list* pairs) {
    return pairs ? pairs->pairs.size() : 0;
}

const char* nvs_pair_list_scene_id(const nvs_pair_list* pairs, size_t i) {
    if (!pairs || i >= pairs->pairs.size()) return nullptr;
    return pairs->pairs[i].scene_id.c_str();
}

const char* nvs_pair_list_range(const nvs_pair_list* pairs, size_t i) {
    if (!pairs || i >= pairs->pairs.size()) return nullptr;
    return pairs->range_names[i].c_str();
}

nvs_status nvs_pair_list_indices(const nvs_pair_list* pairs, size_t i, int64_t* src_index,
                                 int64_t* dst_index) {
    if (!pairs || i >= pairs->pairs.size()) return arg_error("nvs_pair_list_indices: bad index");
    if (src_index) *src_index = pairs->pairs[i].src_index;
    if (dst_index) *dst_index = pairs->pairs[i].dst_index;
    return NVS_OK;
}

nvs_status nvs_pair_list_geometry(const nvs_pair_list* pairs, size_t i, nvs_pose* pose,
                                  nvs_intrinsics* k_src, nvs_intrinsics* k_dst) {
    if (!pairs || i >= pairs->pairs.size()) return arg_error("nvs_pair_list_geometry: bad index");
    const auto& p = pairs->pairs[i];
    if (pose) *pose = pose_to_c(p.relative_pose);
    if (k_src) *k_src = to_c(p.k_src);
    if (k_dst) *k_dst = to_c(p.k_dst);
    return NVS_OK;
}

nvs_status nvs_pair_list_to_json(const nvs_pair_list* pairs, char** out_json) {
    if (!pairs || !out_json) return arg_error("nvs_pair_list_to_json: null argument");
    return guarded([&] { *out_json = dup_string(nvs::dataset::pairs_to_json(pairs->pairs)); });
}

nvs_status nvs_pair_list_from_json(const char* json_text, nvs_pair_list** out) {
    if (!json_text || !out) return arg_error("nvs_pair_list_from_json: null argument");
    return guarded([&] { *out = wrap_pairs(nvs::dataset::pairs_from_json(json_text)); });
}

/* --- epipolar -------------------------------------------------------------- */

nvs_status nvs_fundamental_matrix(const nvs_intrinsics* k_src, const nvs_intrinsics* k_dst,
                                  const nvs_pose* pose, double out[9]) {
    if (!k_src || !k_dst || !pose || !out) return arg_error("nvs_fundamental_matrix: null argument");
    return guarded([&] {
        const auto f =
            nvs::epipolar::fundamental_matrix(from_c(*k_src), from_c(*k_dst), pose_from_c(*pose));
        matrix_to_row_major(f.m, out);
    });
}

nvs_status nvs_epipolar_distance_matrix(const double f[9], uint32_t dst_rows, uint32_t dst_cols,
                                        uint32_t src_rows, uint32_t src_cols,
                                        uint32_t image_height, uint32_t image_width,
                                        nvs_tensor** out, uint32_t* n_degenerate_rows) {
    if (!f || !out) return arg_error("nvs_epipolar_distance_matrix: null argument");
    return guarded([&] {
        const auto fm = nvs::epipolar::FundamentalMatrix::from_matrix(matrix_from_row_major(f));
        const auto dm = nvs::epipolar::epipolar_distance_matrix(
            fm, {static_cast<int>(dst_rows), static_cast<int>(dst_cols)},
            {static_cast<int>(src_rows), static_cast<int>(src_cols)},
            static_cast<int>(image_height), static_cast<int>(image_width));
        nvs::Tensor t(std::vector<uint32_t>{dst_rows * dst_cols, src_rows * src_cols});
        for (Eigen::Index r = 0; r < dm.distances.rows(); ++r) {
            for (Eigen::Index c = 0; c < dm.distances.cols(); ++c) {
                t.data[static_cast<size_t>(r) * dm.distances.cols() + c] =
                    static_cast<float>(dm.distances(r, c));
            }
        }
        if (n_degenerate_rows) *n_degenerate_rows = static_cast<uint32_t>(dm.degenerate_rows.size());
        *out = new nvs_tensor{std::move(t)};
    });
}

nvs_status nvs_attention_bias(const nvs_tensor* distances, const double* m, const double* tau,
                              const double* c, const double* b, uint32_t heads, nvs_tensor** out) {
    if (!distances || !m || !tau || !c || !b || !out || heads == 0) {
        return arg_error("nvs_attention_bias: bad argument");
    }
    if (distances->t.rank() != 2) return arg_error("nvs_attention_bias: distances must be rank 2");
    return guarded([&] {
        const uint32_t rows = distances->t.dims[0];
        const uint32_t cols = distances->t.dims[1];
        nvs::epipolar::EpipolarDistanceMatrix dm;
        dm.distances.resize(rows, cols);
        for (uint32_t r = 0; r < rows; ++r) {
            for (uint32_t cc = 0; cc < cols; ++cc) {
                dm.distances(r, cc) = distances->t.data[static_cast<size_t>(r) * cols + cc];
            }
        }
        std::vector<nvs::epipolar::EpipolarMixParams> params(heads);
        for (uint32_t h = 0; h < heads; ++h) params[h] = {m[h], tau[h], c[h], b[h]};
        const auto bias = nvs::epipolar::attention_bias(dm, params);

        nvs::Tensor t(std::vector<uint32_t>{heads, rows, cols});
        size_t idx = 0;
        for (const Eigen::MatrixXd& head : bias) {
            for (uint32_t r = 0; r < rows; ++r) {
                for (uint32_t cc = 0; cc < cols; ++cc) {
                    t.data[idx++] = static_cast<float>(head(r, cc));
                }
            }
        }
        *out = new nvs_tensor{std::move(t)};
    });
}

nvs_status nvs_joint_attention(const nvs_tensor* q_dst, const nvs_tensor* k_dst,
                               const nvs_tensor* v_dst, const nvs_tensor* k_src,
                               const nvs_tensor* v_src, const nvs_tensor* bias, uint32_t heads,
                               nvs_tensor** out, nvs_tensor** out_attention) {
    if (!q_dst || !k_dst || !v_dst || !k_src || !v_src || !out || heads == 0) {
        return arg_error("nvs_joint_attention: bad argument");
    }
    return guarded([&] {
        const Eigen::MatrixXd q = matrix_from_tensor(q_dst->t, "q_dst");
        const Eigen::MatrixXd kd = matrix_from_tensor(k_dst->t, "k_dst");
        const Eigen::MatrixXd vd = matrix_from_tensor(v_dst->t, "v_dst");
        const Eigen::MatrixXd ks = matrix_from_tensor(k_src->t, "k_src");
        const Eigen::MatrixXd vs = matrix_from_tensor(v_src->t, "v_src");

        std::vector<Eigen::MatrixXd> bias_mats;
        if (bias) {
            if (bias->t.rank() != 3 || bias->t.dims[0] != heads) {
                nvs::fail(Status::invalid_argument, "bias must have shape (heads, n_dst, n_src)");
            }
            const uint32_t rows = bias->t.dims[1], cols = bias->t.dims[2];
            for (uint32_t h = 0; h < heads; ++h) {
                Eigen::MatrixXd bm(rows, cols);
                const size_t base = static_cast<size_t>(h) * rows * cols;
                for (uint32_t r = 0; r < rows; ++r) {
                    for (uint32_t c = 0; c < cols; ++c) {
                        bm(r, c) = bias->t.data[base + static_cast<size_t>(r) * cols + c];
                    }
                }
                bias_mats.push_back(std::move(bm));
            }
        }

        const auto result = nvs::epipolar::joint_attention(
            q, kd, vd, ks, vs, bias ? &bias_mats : nullptr, static_cast<int>(heads));

        nvs::Tensor t(std::vector<uint32_t>{static_cast<uint32_t>(result.output.rows()),
                                            static_cast<uint32_t>(result.output.cols())});
        for (Eigen::Index r = 0; r < result.output.rows(); ++r) {
            for (Eigen::Index c = 0; c < result.output.cols(); ++c) {
                t.data[static_cast<size_t>(r) * result.output.cols() + c] =
                    static_cast<float>(result.output(r, c));
            }
        }
        std::unique_ptr<nvs_tensor> attention_out;
        if (out_attention) {
            const auto& att = result.attention;
            nvs::Tensor a(std::vector<uint32_t>{heads, static_cast<uint32_t>(att[0].rows()),
                                                static_cast<uint32_t>(att[0].cols())});
            size_t idx = 0;
            for (const Eigen::MatrixXd& head : att) {
                for (Eigen::Index r = 0; r < head.rows(); ++r) {
                    for (Eigen::Index c = 0; c < head.cols(); ++c) {
                        a.data[idx++] = static_cast<float>(head(r, c));
                    }
                }
            }
            attention_out = std::make_unique<nvs_tensor>(nvs_tensor{std::move(a)});
        }
        *out = new nvs_tensor{std::move(t)};
        if (out_attention) *out_attention = attention_out.release();
    });
}

/* --- encodings --------------------------------------------------------------- */

nvs_status nvs_pose_embedding(const nvs_pose* pose_dst_to_src, const nvs_intrinsics* k_src,
                              const nvs_intrinsics* k_dst, double out[20]) {
    if (!pose_dst_to_src || !k_src || !k_dst || !out) {
        return arg_error("nvs_pose_embedding: null argument");
    }
    return guarded([&] {
        const auto e = nvs::encoding::pose_embedding(pose_from_c(*pose_dst_to_src),
                                                     from_c(*k_src), from_c(*k_dst));
        std::copy(e.begin(), e.end(), out);
    });
}

nvs_status nvs_compute_pose_stats(const nvs_pair_list* pairs, nvs_embedding_stats* out) {
    if (!pairs || !out) return arg_error("nvs_compute_pose_stats: null argument");
    return guarded([&] {
        const auto stats = nvs::dataset::compute_pose_stats(pairs->pairs);
        std::copy(stats.mean.begin(), stats.mean.end(), out->mean);
        std::copy(stats.std.begin(), stats.std.end(), out->std_dev);
    });
}

nvs_status nvs_normalize_embedding(const double in[20], const nvs_embedding_stats* stats,
                                   double out[20]) {
    if (!in || !stats || !out) return arg_error("nvs_normalize_embedding: null argument");
    return guarded([&] {
        nvs::encoding::PoseEmbedding e;
        std::copy(in, in + 20, e.begin());
        nvs::encoding::EmbeddingStats s;
        std::copy(stats->mean, stats->mean + 20, s.mean.begin());
        std::copy(stats->std_dev, stats->std_dev + 20, s.std.begin());
        const auto n = nvs::encoding::normalize_embedding(e, s);
        std::copy(n.begin(), n.end(), out);
    });
}

nvs_status nvs_normalize_depth(const nvs_tensor* depth, nvs_tensor** out) {
    if (!depth || !out) return arg_error("nvs_normalize_depth: null argument");
    return guarded([&] {
        const auto d = nvs::encoding::normalize_depth(depth_from_tensor(depth->t));
        nvs::Tensor t(depth->t.dims);
        for (size_t i = 0; i < d.data.size(); ++i) t.data[i] = static_cast<float>(d.data[i]);
        *out = new nvs_tensor{std::move(t)};
    });
}

nvs_status nvs_warp_coordinates(const nvs_tensor* depth, const nvs_intrinsics* k_src,
                                const nvs_intrinsics* k_dst, const nvs_pose* pose,
                                uint32_t out_height, uint32_t out_width, nvs_tensor** out_grid) {
    if (!depth || !k_src || !k_dst || !pose || !out_grid) {
        return arg_error("nvs_warp_coordinates: null argument");
    }
    return guarded([&] {
        const auto grid = nvs::encoding::warp_coordinates(
            depth_from_tensor(depth->t), from_c(*k_src), from_c(*k_dst), pose_from_c(*pose),
            static_cast<int>(out_height), static_cast<int>(out_width));
        *out_grid = grid_to_tensor(grid);
    });
}

nvs_status nvs_identity_grid(uint32_t height, uint32_t width, nvs_tensor** out_grid) {
    if (!out_grid || height == 0 || width == 0) return arg_error("nvs_identity_grid: bad argument");
    return guarded([&] {
        *out_grid = grid_to_tensor(
            nvs::encoding::identity_grid(static_cast<int>(height), static_cast<int>(width)));
    });
}

nvs_status nvs_fourier_features(const nvs_tensor* grid, uint32_t src_width, uint32_t src_height,
                                uint32_t channels, nvs_tensor** out) {
    if (!grid || !out) return arg_error("nvs_fourier_features: null argument");
    if (grid->t.rank() != 3 || grid->t.dims[2] != 2) {
        return arg_error("nvs_fourier_features: grid must have shape (H, W, 2)");
    }
    return guarded([&] {
        nvs::encoding::CoordinateGrid g(static_cast<int>(grid->t.dims[0]),
                                        static_cast<int>(grid->t.dims[1]),
                                        static_cast<int>(src_width), static_cast<int>(src_height));
        for (size_t i = 0; i < grid->t.data.size(); ++i) g.data[i] = grid->t.data[i];
        const auto features = nvs::encoding::fourier_features(g, static_cast<int>(channels));
        nvs::Tensor t(std::vector<uint32_t>{static_cast<uint32_t>(features.height),
                                            static_cast<uint32_t>(features.width),
                                            static_cast<uint32_t>(features.channels)});
        for (size_t i = 0; i < features.data.size(); ++i) {
            t.data[i] = static_cast<float>(features.data[i]);
        }
        *out = new nvs_tensor{std::move(t)};
    });
}

/* --- images and augmentation ---------------------------------------------------- */

nvs_status nvs_image_create(uint32_t height, uint32_t width, const float* data, nvs_image** out) {
    if (!out || height == 0 || width == 0) return arg_error("nvs_image_create: bad argument");
    return guarded([&] {
        nvs::ImageBuffer img(static_cast<int>(height), static_cast<int>(width));
        if (data) {
            std::copy(data, data + img.data.size(), img.data.begin());
            nvs::image::validate(img);
        }
        *out = new nvs_image{std::move(img)};
    });
}

void nvs_image_destroy(nvs_image* img) {
    delete img;
}

uint32_t nvs_image_height(const nvs_image* img) {
    return img ? static_cast<uint32_t>(img->img.height) : 0;
}

uint32_t nvs_image_width(const nvs_image* img) {
    return img ? static_cast<uint32_t>(img->img.width) : 0;
}

float* nvs_image_data(nvs_image* img) {
    return img ? img->img.data.data() : nullptr;
}

const float* nvs_image_data_const(const nvs_image* img) {
    return img ? img->img.data.data() : nullptr;
}

nvs_status nvs_image_load_png(const char* path, nvs_image** out) {
    if (!path || !out) return arg_error("nvs_image_load_png: null argument");
    return guarded([&] { *out = new nvs_image{nvs::image::read_png(path)}; });
}

nvs_status nvs_image_save_png(const nvs_image* img, const char* path) {
    if (!img || !path) return arg_error("nvs_image_save_png: null argument");
    return guarded([&] { nvs::image::write_png(img->img, path); });
}

nvs_status nvs_image_prepare_square(const nvs_image* img, uint32_t size, nvs_image** out) {
    if (!img || !out || size == 0) return arg_error("nvs_image_prepare_square: bad argument");
    return guarded([&] {
        *out = new nvs_image{nvs::image::prepare_square(img->img, static_cast<int>(size))};
    });
}

nvs_status nvs_homography_from_rotation(const nvs_intrinsics* k, const double rotation[9],
                                        double out_h[9]) {
    if (!k || !rotation || !out_h) return arg_error("nvs_homography_from_rotation: null argument");
    return guarded([&] {
        matrix_to_row_major(
            nvs::homoaug::homography_from_rotation(from_c(*k), matrix_from_row_major(rotation)),
            out_h);
    });
}

nvs_status nvs_warp_image(const nvs_image* img, const double h[9], uint32_t out_height,
                          uint32_t out_width, nvs_image** out, nvs_tensor** out_mask) {
    if (!img || !h || !out) return arg_error("nvs_warp_image: null argument");
    return guarded([&] {
        const auto warped = nvs::homoaug::warp_image(img->img, matrix_from_row_major(h),
                                                     static_cast<int>(out_height),
                                                     static_cast<int>(out_width));
        if (out_mask) {
            nvs::Tensor mask(std::vector<uint32_t>{out_height, out_width});
            for (size_t i = 0; i < warped.mask.data.size(); ++i) {
                mask.data[i] = warped.mask.data[i] ? 1.0f : 0.0f;
            }
            *out_mask = new nvs_tensor{std::move(mask)};
        }
        *out = new nvs_image{warped.image};
    });
}

nvs_status nvs_augment_pair(const nvs_image* img512, nvs_rng* rng, uint32_t model_resolution,
                            nvs_image** out_src, nvs_image** out_dst, nvs_pose* out_pose,
                            nvs_intrinsics* out_k, nvs_augment_info* out_info) {
    if (!img512 || !rng || !out_src || !out_dst) return arg_error("nvs_augment_pair: null argument");
    return guarded([&] {
        const auto pair =
            nvs::homoaug::make_pair(img512->img, rng->rng, static_cast<int>(model_resolution));
        auto src = std::make_unique<nvs_image>(nvs_image{pair.src_image});
        auto dst = std::make_unique<nvs_image>(nvs_image{pair.dst_image});
        *out_src = src.release();
        *out_dst = dst.release();
        if (out_pose) *out_pose = pose_to_c(pair.relative_pose);
        if (out_k) *out_k = to_c(pair.k_src);
        if (out_info) {
            out_info->yaw_src = pair.rot_src.yaw_deg;
            out_info->pitch_src = pair.rot_src.pitch_deg;
            out_info->roll_src = pair.rot_src.roll_deg;
            out_info->yaw_dst = pair.rot_dst.yaw_deg;
            out_info->pitch_dst = pair.rot_dst.pitch_deg;
            out_info->roll_dst = pair.rot_dst.roll_deg;
            out_info->regime = pair.rot_src.regime == nvs::homoaug::Regime::narrow ? 0 : 1;
            out_info->crop = pair.rot_src.crop;
            out_info->attempts = pair.attempts;
        }
    });
}

/* --- diffusion ---------------------------------------------------------------- */

nvs_status nvs_sample_sigma(double p_mean, double p_std, nvs_rng* rng, double* out) {
    if (!rng || !out) return arg_error("nvs_sample_sigma: null argument");
    return guarded([&] {
        *out = nvs::diffusion::sample_sigma({p_mean, p_std}, rng->rng);
    });
}

nvs_status nvs_cfg_combine(const nvs_tensor* d_cond, const nvs_tensor* d_uncond, double w,
                           nvs_tensor** out) {
    if (!d_cond || !d_uncond || !out) return arg_error("nvs_cfg_combine: null argument");
    if (d_cond->t.dims != d_uncond->t.dims) return arg_error("nvs_cfg_combine: shape mismatch");
    return guarded([&] {
        nvs::Tensor t(d_cond->t.dims);
        for (size_t i = 0; i < t.data.size(); ++i) {
            const double c = d_cond->t.data[i];
            const double u = d_uncond->t.data[i];
            t.data[i] = static_cast<float>(u + w * (c - u));
        }
        *out = new nvs_tensor{std::move(t)};
    });
}

nvs_status nvs_condition_augment(const nvs_tensor* img, double sigma_aug, nvs_rng* rng,
                                 nvs_tensor** out) {
    if (!img || !rng || !out) return arg_error("nvs_condition_augment: null argument");
    return guarded([&] {
        std::vector<double> x(img->t.data.begin(), img->t.data.end());
        const auto augmented = nvs::diffusion::condition_augment(x, sigma_aug, rng->rng);
        nvs::Tensor t(img->t.dims);
        for (size_t i = 0; i < t.data.size(); ++i) {
            t.data[i] = static_cast<float>(augmented.image[i]);
        }
        *out = new nvs_tensor{std::move(t)};
    });
}

nvs_status nvs_sigma_schedule(int num_steps, double sigma_min, double sigma_max, double rho,
                              double* out) {
    if (!out) return arg_error("nvs_sigma_schedule: null output");
    return guarded([&] {
        const auto sigmas =
            nvs::diffusion::sigma_schedule({num_steps, sigma_min, sigma_max, rho});
        std::copy(sigmas.begin(), sigmas.end(), out);
    });
}

nvs_status nvs_edm_sample(nvs_denoiser_fn denoiser, void* user, int num_steps, double sigma_min,
                          double sigma_max, double rho, const double* initial, size_t n,
                          double* out) {
    if (!denoiser || !initial || !out || n == 0) return arg_error("nvs_edm_sample: bad argument");
    return guarded([&] {
        nvs::diffusion::Denoiser wrapped = [&](const std::vector<double>& x, double sigma) {
            std::vector<double> d(x.size());
            if (denoiser(user, x.data(), x.size(), sigma, d.data()) != 0) {
                nvs::fail(Status::numeric_error, "denoiser callback reported failure");
            }
            return d;
        };
        const auto result = nvs::diffusion::edm_sample(
            wrapped, {num_steps, sigma_min, sigma_max, rho},
            std::vector<double>(initial, initial + n));
        std::copy(result.begin(), result.end(), out);
    });
}

nvs_status nvs_edm_sample_gaussian(int num_steps, double sigma_min, double sigma_max, double rho,
                                   double mu, double sigma_data, uint32_t dim, uint32_t count,
                                   uint64_t seed, nvs_tensor** out) {
    if (!out || dim == 0 || count == 0) return arg_error("nvs_edm_sample_gaussian: bad argument");
    return guarded([&] {
        const nvs::diffusion::SamplerConfig config{num_steps, sigma_min, sigma_max, rho};
        const auto denoiser = nvs::diffusion::gaussian_denoiser({mu}, sigma_data);
        nvs::Rng rng(seed);
        nvs::Tensor t(std::vector<uint32_t>{count, dim});
        std::vector<double> init(dim);
        for (uint32_t i = 0; i < count; ++i) {
            for (uint32_t j = 0; j < dim; ++j) init[j] = sigma_max * rng.normal();
            const auto sample = nvs::diffusion::edm_sample(denoiser, config, init);
            for (uint32_t j = 0; j < dim; ++j) {
                t.data[static_cast<size_t>(i) * dim + j] = static_cast<float>(sample[j]);
            }
        }
        *out = new nvs_tensor{std::move(t)};
    });
}

/* --- metrics ----------------------------------------------------------------- */

nvs_status nvs_psnr(const nvs_image* a, const nvs_image* b, double* out_db) {
    if (!a || !b || !out_db) return arg_error("nvs_psnr: null argument");
    return guarded([&] { *out_db = nvs::metrics::psnr(a->img, b->img); });
}

nvs_status nvs_frechet_distance(const nvs_tensor* a, const nvs_tensor* b, double* out) {
    if (!a || !b || !out) return arg_error("nvs_frechet_distance: null argument");
    return guarded([&] {
        *out = nvs::metrics::frechet_distance(
            nvs::metrics::summarize(features_from_tensor(a->t, "features_a")),
            nvs::metrics::summarize(features_from_tensor(b->t, "features_b")));
    });
}

nvs_status nvs_joint_frechet_distance(const nvs_tensor* src_a, const nvs_tensor* dst_a,
                                      const nvs_tensor* src_b, const nvs_tensor* dst_b,
                                      double* out) {
    if (!src_a || !dst_a || !src_b || !dst_b || !out) {
        return arg_error("nvs_joint_frechet_distance: null argument");
    }
    return guarded([&] {
        *out = nvs::metrics::joint_frechet_distance(features_from_tensor(src_a->t, "src_a"),
                                                    features_from_tensor(dst_a->t, "dst_a"),
                                                    features_from_tensor(src_b->t, "src_b"),
                                                    features_from_tensor(dst_b->t, "dst_b"));
    });
}

}  // extern "C"
