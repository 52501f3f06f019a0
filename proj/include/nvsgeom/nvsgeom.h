/*
 * nvsgeom: multi-view geometry and data-pipeline engine for novel view
 * synthesis: camera-pose algebra, epipolar attention bias, geometric
 * conditioning encodings, homography single-view augmentation, diffusion
 * sampling utilities, and Frechet-distance metrics.
 *
 * C surface of the shared library. Heavy objects travel as opaque handles;
 * small geometric values are plain structs. Every fallible call returns an
 * nvs_status; on failure nvs_last_error() yields a thread-local message for
 * the failing call.
 */
#ifndef NVSGEOM_H
#define NVSGEOM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NVS_API __declspec(dllexport)
#else
#define NVS_API __attribute__((visibility("default")))
#endif

typedef enum nvs_status {
    NVS_OK = 0,
    NVS_ERR_INVALID_ARGUMENT = 1,
    NVS_ERR_IO = 2,
    NVS_ERR_PARSE = 3,
    NVS_ERR_DEGENERATE = 4,
    NVS_ERR_NUMERIC = 5,
    NVS_ERR_UNSUPPORTED = 6,
} nvs_status;

/* Library semantic version, e.g. "0.1.0". */
NVS_API const char* nvs_version(void);

/* Message for the most recent failing call on this thread. Never NULL. */
NVS_API const char* nvs_last_error(void);

/* Free any char* returned by nvs_*_json / nvs_*_string functions. */
NVS_API void nvs_string_free(char* s);

/* --------------------------------------------------------------------- */
/* Small value types                                                      */
/* --------------------------------------------------------------------- */

/* Pinhole intrinsics in pixels. */
typedef struct nvs_intrinsics {
    double fx, fy;
    double cx, cy;
    double width, height;
} nvs_intrinsics;

/* World -> camera rigid transform, x_cam = R x_world + t. Row-major R. */
typedef struct nvs_extrinsics {
    double rotation[9];
    double translation[3];
} nvs_extrinsics;

/* Source-camera -> destination-camera rigid transform. Row-major R. */
typedef struct nvs_pose {
    double rotation[9];
    double translation[3];
} nvs_pose;

/* --------------------------------------------------------------------- */
/* Camera algebra                                                         */
/* --------------------------------------------------------------------- */

/* T_{src->dst} = T_dst * T_src^{-1} via 4x4 homogeneous composition. */
NVS_API nvs_status nvs_relative_pose(const nvs_extrinsics* src, const nvs_extrinsics* dst,
                                     nvs_pose* out);

NVS_API nvs_status nvs_pose_inverse(const nvs_pose* pose, nvs_pose* out);

/* out = second ∘ first. */
NVS_API nvs_status nvs_pose_compose(const nvs_pose* second, const nvs_pose* first, nvs_pose* out);

/* Row-major K = [[fx,0,cx],[0,fy,cy],[0,0,1]]. */
NVS_API nvs_status nvs_intrinsics_matrix(const nvs_intrinsics* k, double out[9]);

NVS_API nvs_status nvs_rescale_intrinsics(const nvs_intrinsics* k, double factor,
                                          nvs_intrinsics* out);

/* Euler rotation in degrees, composed Rz(roll) Rx(pitch) Ry(yaw); x left,
 * y down, z forward. Row-major output. */
NVS_API nvs_status nvs_rotation_from_ypr(double yaw_deg, double pitch_deg, double roll_deg,
                                         double out[9]);

/* --------------------------------------------------------------------- */
/* Deterministic RNG (counter-based SplitMix64)                           */
/* --------------------------------------------------------------------- */

typedef struct nvs_rng nvs_rng;

NVS_API nvs_rng* nvs_rng_create(uint64_t seed);
NVS_API void nvs_rng_destroy(nvs_rng* rng);
/* Independent child seed for parallel stream `index` of `seed`. */
NVS_API uint64_t nvs_rng_derive(uint64_t seed, uint64_t index);
/* Raw 64-bit word / uniform [0,1) / standard normal draws. */
NVS_API uint64_t nvs_rng_next(nvs_rng* rng);
NVS_API double nvs_rng_uniform(nvs_rng* rng);
NVS_API double nvs_rng_normal(nvs_rng* rng);

/* --------------------------------------------------------------------- */
/* Tensors and the NVST file format                                       */
/* --------------------------------------------------------------------- */

/* Dense row-major f32 tensor. File format: magic "NVST", u16 version = 1,
 * u8 dtype = 1 (f32), u8 ndim, ndim x u32 dims, payload; all little-endian. */
typedef struct nvs_tensor nvs_tensor;

NVS_API nvs_status nvs_tensor_create(const uint32_t* dims, size_t ndim, nvs_tensor** out);
NVS_API void nvs_tensor_destroy(nvs_tensor* t);
NVS_API size_t nvs_tensor_rank(const nvs_tensor* t);
NVS_API uint32_t nvs_tensor_dim(const nvs_tensor* t, size_t axis);
NVS_API size_t nvs_tensor_size(const nvs_tensor* t);
NVS_API float* nvs_tensor_data(nvs_tensor* t);
NVS_API const float* nvs_tensor_data_const(const nvs_tensor* t);
NVS_API nvs_status nvs_tensor_save(const nvs_tensor* t, const char* path);
NVS_API nvs_status nvs_tensor_load(const char* path, nvs_tensor** out);

/* --------------------------------------------------------------------- */
/* Scenes and pair sampling                                               */
/* --------------------------------------------------------------------- */

typedef struct nvs_scene_list nvs_scene_list;

/* Parse a single camera file (header line, then per-frame records). */
NVS_API nvs_status nvs_scene_list_load_file(const char* path, const char* scene_id,
                                            nvs_scene_list** out);

/* Parse every "*.txt" camera file under dir (sorted by name). With skip_bad,
 * malformed files are logged and counted in *n_skipped instead of failing. */
NVS_API nvs_status nvs_scene_list_load_dir(const char* dir, int skip_bad,
                                           nvs_scene_list** out, size_t* n_skipped);

/* Load the camera files referenced by an index JSON (see ..._index_json). */
NVS_API nvs_status nvs_scene_list_load_index(const char* index_json_path, nvs_scene_list** out);

NVS_API void nvs_scene_list_destroy(nvs_scene_list* scenes);
NVS_API size_t nvs_scene_list_count(const nvs_scene_list* scenes);
NVS_API nvs_status nvs_scene_list_frame_count(const nvs_scene_list* scenes, size_t scene,
                                              size_t* out);

/* Per-scene translation-scale normalization (max pairwise relative
 * translation norm becomes 1). Scenes with < 2 frames are skipped. */
NVS_API nvs_status nvs_scene_list_normalize_scale(nvs_scene_list* scenes, size_t* n_skipped);

/* Scene index manifest: {"scenes":[{scene_id, path, frame_count,
 * timestamp_first, timestamp_last}]}. Caller frees with nvs_string_free. */
NVS_API nvs_status nvs_scene_list_index_json(const nvs_scene_list* scenes, char** out_json);

typedef struct nvs_pair_list nvs_pair_list;

/* range: "train" | "mid" | "long". Pairs are deterministic in seed. Unique
 * pairs are drawn without replacement when `count` fits, otherwise with
 * replacement and *with_replacement = 1. Intrinsics are denormalized at
 * (width, height). Fails with NVS_ERR_DEGENERATE when no scene admits the
 * range. */
NVS_API nvs_status nvs_sample_pairs(const nvs_scene_list* scenes, const char* range,
                                    size_t count, double width, double height, uint64_t seed,
                                    nvs_pair_list** out, int* with_replacement);

NVS_API void nvs_pair_list_destroy(nvs_pair_list* pairs);
NVS_API size_t nvs_pair_list_count(const nvs_pair_list* pairs);
/* Pointer owned by the list; valid until the list is destroyed. */
NVS_API const char* nvs_pair_list_scene_id(const nvs_pair_list* pairs, size_t i);
NVS_API const char* nvs_pair_list_range(const nvs_pair_list* pairs, size_t i);
NVS_API nvs_status nvs_pair_list_indices(const nvs_pair_list* pairs, size_t i,
                                         int64_t* src_index, int64_t* dst_index);
/* Relative pose T_{src->dst} plus the pair intrinsics. Outputs may be NULL. */
NVS_API nvs_status nvs_pair_list_geometry(const nvs_pair_list* pairs, size_t i, nvs_pose* pose,
                                          nvs_intrinsics* k_src, nvs_intrinsics* k_dst);

/* JSON array of PairSample records (schema in the README). */
NVS_API nvs_status nvs_pair_list_to_json(const nvs_pair_list* pairs, char** out_json);
NVS_API nvs_status nvs_pair_list_from_json(const char* json_text, nvs_pair_list** out);

/* --------------------------------------------------------------------- */
/* Epipolar geometry and attention                                        */
/* --------------------------------------------------------------------- */

/* Frobenius-normalized F = K_dst^{-T} [t]x R K_src^{-1}, row-major.
 * NVS_ERR_DEGENERATE when ||t|| < 1e-8 (pure rotation). */
NVS_API nvs_status nvs_fundamental_matrix(const nvs_intrinsics* k_src,
                                          const nvs_intrinsics* k_dst,
                                          const nvs_pose* pose, double out[9]);

/* Token-grid epipolar distance matrix, shape (dst_rows*dst_cols,
 * src_rows*src_cols), in image pixels. Destination tokens with degenerate
 * lines are filled with the 1e4 sentinel and counted in *n_degenerate_rows
 * (may be NULL). */
NVS_API nvs_status nvs_epipolar_distance_matrix(const double f[9], uint32_t dst_rows,
                                                uint32_t dst_cols, uint32_t src_rows,
                                                uint32_t src_cols, uint32_t image_height,
                                                uint32_t image_width, nvs_tensor** out,
                                                uint32_t* n_degenerate_rows);

/* Per-head bias m*sigmoid(tau*(c - D)) + b over a (Dd, Ds) distance tensor.
 * m/tau/c/b each hold `heads` scalars. Output shape (heads, Dd, Ds). */
NVS_API nvs_status nvs_attention_bias(const nvs_tensor* distances, const double* m,
                                      const double* tau, const double* c, const double* b,
                                      uint32_t heads, nvs_tensor** out);

/* Joint self/cross attention. Row-major token matrices: q/k/v_dst are
 * (n_dst, dim), k/v_src are (n_src, dim); optional bias is (heads, n_dst,
 * n_src) and is added to the source block of the logits. out is (n_dst,
 * dim); out_attention (may be NULL) receives (heads, n_dst, n_dst+n_src). */
NVS_API nvs_status nvs_joint_attention(const nvs_tensor* q_dst, const nvs_tensor* k_dst,
                                       const nvs_tensor* v_dst, const nvs_tensor* k_src,
                                       const nvs_tensor* v_src, const nvs_tensor* bias,
                                       uint32_t heads, nvs_tensor** out,
                                       nvs_tensor** out_attention);

/* --------------------------------------------------------------------- */
/* Geometric conditioning encodings                                       */
/* --------------------------------------------------------------------- */

/* 20-element encoding: row-major flatten of the 3x4 destination-to-source
 * pose, then (fx,fy,cx,cy) of source then destination. */
NVS_API nvs_status nvs_pose_embedding(const nvs_pose* pose_dst_to_src,
                                      const nvs_intrinsics* k_src, const nvs_intrinsics* k_dst,
                                      double out[20]);

typedef struct nvs_embedding_stats {
    double mean[20];
    double std_dev[20]; /* clamped below at 1e-6 */
} nvs_embedding_stats;

/* Elementwise mean / population std of the pose embeddings of a pair list. */
NVS_API nvs_status nvs_compute_pose_stats(const nvs_pair_list* pairs, nvs_embedding_stats* out);

NVS_API nvs_status nvs_normalize_embedding(const double in[20], const nvs_embedding_stats* stats,
                                           double out[20]);

/* Invert, scale by the max of the inverse, standardize to zero mean / unit
 * std. Input (H, W) strictly positive; output same shape. */
NVS_API nvs_status nvs_normalize_depth(const nvs_tensor* depth, nvs_tensor** out);

/* Forward-splat coordinate warp. depth is (H, W); output grid is (out_h,
 * out_w, 2) holding matching source (x, y) or the sentinel (-1, -1). */
NVS_API nvs_status nvs_warp_coordinates(const nvs_tensor* depth, const nvs_intrinsics* k_src,
                                        const nvs_intrinsics* k_dst, const nvs_pose* pose,
                                        uint32_t out_height, uint32_t out_width,
                                        nvs_tensor** out_grid);

/* Identity coordinate grid (every pixel points at itself), shape (H, W, 2). */
NVS_API nvs_status nvs_identity_grid(uint32_t height, uint32_t width, nvs_tensor** out_grid);

/* Sin/cos Fourier features of a coordinate grid. grid is (H, W, 2) indexing
 * a source view of extent (src_width, src_height); channels is a multiple
 * of 4 (128 by default layout: x bank then y bank, frequency-major, sin
 * before cos, frequencies 2^k pi). Sentinel pixels map to zero channels. */
NVS_API nvs_status nvs_fourier_features(const nvs_tensor* grid, uint32_t src_width,
                                        uint32_t src_height, uint32_t channels,
                                        nvs_tensor** out);

/* --------------------------------------------------------------------- */
/* Images and homography augmentation                                     */
/* --------------------------------------------------------------------- */

/* Interleaved RGB float image in [0, 1]. */
typedef struct nvs_image nvs_image;

NVS_API nvs_status nvs_image_create(uint32_t height, uint32_t width, const float* data,
                                    nvs_image** out);
NVS_API void nvs_image_destroy(nvs_image* img);
NVS_API uint32_t nvs_image_height(const nvs_image* img);
NVS_API uint32_t nvs_image_width(const nvs_image* img);
NVS_API float* nvs_image_data(nvs_image* img);
NVS_API const float* nvs_image_data_const(const nvs_image* img);

NVS_API nvs_status nvs_image_load_png(const char* path, nvs_image** out);
NVS_API nvs_status nvs_image_save_png(const nvs_image* img, const char* path);

/* Center-crop to the largest square, then resize (area filter) to size. */
NVS_API nvs_status nvs_image_prepare_square(const nvs_image* img, uint32_t size, nvs_image** out);

/* H = K R K^{-1} normalized to H(2,2) = 1. Row-major in and out. */
NVS_API nvs_status nvs_homography_from_rotation(const nvs_intrinsics* k, const double rotation[9],
                                                double out_h[9]);

/* Inverse bilinear warp. out_mask (may be NULL) is (out_h, out_w) with 1.0
 * where the sample was fully inside the input. */
NVS_API nvs_status nvs_warp_image(const nvs_image* img, const double h[9], uint32_t out_height,
                                  uint32_t out_width, nvs_image** out, nvs_tensor** out_mask);

typedef struct nvs_augment_info {
    double yaw_src, pitch_src, roll_src;    /* degrees */
    double yaw_dst, pitch_dst, roll_dst;
    int32_t regime;                         /* 0 = narrow (crop 384), 1 = wide (crop 320) */
    int32_t crop;                           /* pixels, before the final resize */
    int32_t attempts;                       /* rotation draws consumed (max 10) */
} nvs_augment_info;

/* Rotation-only augmented pair from a 512x512 image. The emitted pose has
 * exactly zero translation; k_src == k_dst reflect the crop and resize.
 * NVS_ERR_NUMERIC after 10 rejected rotation draws. */
NVS_API nvs_status nvs_augment_pair(const nvs_image* img512, nvs_rng* rng,
                                    uint32_t model_resolution, nvs_image** out_src,
                                    nvs_image** out_dst, nvs_pose* out_pose,
                                    nvs_intrinsics* out_k, nvs_augment_info* out_info);

/* --------------------------------------------------------------------- */
/* Diffusion sampling utilities                                           */
/* --------------------------------------------------------------------- */

/* sigma = exp(p_mean + p_std * z), z standard normal. */
NVS_API nvs_status nvs_sample_sigma(double p_mean, double p_std, nvs_rng* rng, double* out);

/* out = d_uncond + w (d_cond - d_uncond), elementwise over equal shapes. */
NVS_API nvs_status nvs_cfg_combine(const nvs_tensor* d_cond, const nvs_tensor* d_uncond,
                                   double w, nvs_tensor** out);

/* Adds sigma_aug * N(0, 1) noise to a [-1, 1] tensor. */
NVS_API nvs_status nvs_condition_augment(const nvs_tensor* img, double sigma_aug, nvs_rng* rng,
                                         nvs_tensor** out);

/* Denoiser callback: write the denoised estimate of x (length n at noise
 * level sigma) into out; return 0 on success. */
typedef int (*nvs_denoiser_fn)(void* user, const double* x, size_t n, double sigma, double* out);

/* Karras sigma schedule: writes num_steps + 1 values (terminal 0 included)
 * into out. */
NVS_API nvs_status nvs_sigma_schedule(int num_steps, double sigma_min, double sigma_max,
                                      double rho, double* out);

/* Deterministic Heun ODE sampler over one trajectory. initial, out: length
 * n; initial must already be scaled by sigma_max. */
NVS_API nvs_status nvs_edm_sample(nvs_denoiser_fn denoiser, void* user, int num_steps,
                                  double sigma_min, double sigma_max, double rho,
                                  const double* initial, size_t n, double* out);

/* `count` trajectories of the built-in analytic Gaussian-oracle denoiser for
 * a N(mu, sigma_data^2 I) target in dimension dim; initial noise is drawn
 * internally from `seed`. Output shape (count, dim). */
NVS_API nvs_status nvs_edm_sample_gaussian(int num_steps, double sigma_min, double sigma_max,
                                           double rho, double mu, double sigma_data,
                                           uint32_t dim, uint32_t count, uint64_t seed,
                                           nvs_tensor** out);

/* --------------------------------------------------------------------- */
/* Metrics                                                                */
/* --------------------------------------------------------------------- */

/* 10 log10(1 / MSE); +infinity for identical images. */
NVS_API nvs_status nvs_psnr(const nvs_image* a, const nvs_image* b, double* out_db);

/* Frechet distance between Gaussian fits of two (n, d) feature tensors
 * (sample covariance, 1/(n-1)). */
NVS_API nvs_status nvs_frechet_distance(const nvs_tensor* a, const nvs_tensor* b, double* out);

/* Frechet distance over per-sample (src || dst) concatenations. */
NVS_API nvs_status nvs_joint_frechet_distance(const nvs_tensor* src_a, const nvs_tensor* dst_a,
                                              const nvs_tensor* src_b, const nvs_tensor* dst_b,
                                              double* out);

#ifdef __cplusplus
}
#endif

#endif /* NVSGEOM_H */
