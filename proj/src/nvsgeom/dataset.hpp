#pragma once

#include "nvsgeom/camera.hpp"
#include "nvsgeom/encoding.hpp"
#include "nvsgeom/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nvs::dataset {

/// One line of a camera file. Intrinsics are stored resolution-normalized:
/// fx, cx as fractions of width; fy, cy as fractions of height.
struct FrameRecord {
    std::int64_t timestamp_us = 0;
    CameraIntrinsics intrinsics;  // width == height == 1
    CameraExtrinsics extrinsics;
    int frame_index = 0;

    CameraIntrinsics intrinsics_at(double width, double height) const;
};

struct SceneManifest {
    std::string scene_id;
    std::string source_uri;
    std::vector<FrameRecord> frames;
};

enum class RangeLabel { training, mid, longrange };

const char* to_string(RangeLabel label);
RangeLabel range_label_from_string(const std::string& s);

// Frame-gap windows for evaluation pairs, inclusive, either direction.
inline constexpr int kMidGapMin = 30;
inline constexpr int kMidGapMax = 60;
inline constexpr int kLongGapMin = 60;
inline constexpr int kLongGapMax = 120;

struct PairSample {
    std::string scene_id;
    int src_index = 0;
    int dst_index = 0;
    RangeLabel range_label = RangeLabel::training;
    RelativePose relative_pose;  // T_{src->dst}
    CameraIntrinsics k_src;
    CameraIntrinsics k_dst;
};

/// Parse one camera file: a header line holding the source URI, then one
/// line per frame with
///   timestamp fx fy cx cy 0 0 p11 p12 p13 p14 p21 ... p34
/// where the p block is the row-major 3x4 world-to-camera pose. Any
/// malformed line aborts with its 1-based line number in the message.
SceneManifest parse_camera_file(const std::string& text, const std::string& scene_id);

SceneManifest load_camera_file(const std::string& path, const std::string& scene_id);

/// Inverse of parse_camera_file. Doubles are printed with %.17g, so
/// serialize -> parse -> serialize is byte-stable.
std::string serialize_camera_file(const SceneManifest& scene);

/// Build a PairSample for explicit indices at the given pixel resolution.
PairSample make_pair_sample(const SceneManifest& scene, int src, int dst,
                            RangeLabel label, double width, double height);

/// Two distinct indices, uniform over all ordered pairs.
PairSample sample_training_pair(const SceneManifest& scene, Rng& rng,
                                double width = 1.0, double height = 1.0);

/// Destinations admissible for `src` at the requested range (both directions).
std::vector<int> eval_destinations(const SceneManifest& scene, RangeLabel range, int src);

/// Sources with at least one admissible destination.
std::vector<int> eval_sources(const SceneManifest& scene, RangeLabel range);

/// Uniform destination for a fixed source; nullopt when none qualifies.
std::optional<PairSample> sample_eval_pair_from(const SceneManifest& scene, RangeLabel range,
                                                int src, Rng& rng,
                                                double width = 1.0, double height = 1.0);

/// Uniform source over eval_sources, then uniform admissible destination.
std::optional<PairSample> sample_eval_pair(const SceneManifest& scene, RangeLabel range, Rng& rng,
                                           double width = 1.0, double height = 1.0);

/// Elementwise mean / population std of the 20-element pose embeddings of a
/// pair stream (embedding of T_{dst->src} with the pair intrinsics).
encoding::EmbeddingStats compute_pose_stats(const std::vector<PairSample>& pairs);

// --- JSON interchange ------------------------------------------------------

struct SceneIndexEntry {
    std::string scene_id;
    std::string path;
    std::size_t frame_count = 0;
    std::int64_t timestamp_first = 0;
    std::int64_t timestamp_last = 0;
};

SceneIndexEntry index_entry(const SceneManifest& scene, const std::string& path);

std::string scene_index_to_json(const std::vector<SceneIndexEntry>& entries);
std::vector<SceneIndexEntry> scene_index_from_json(const std::string& json_text);

std::string pairs_to_json(const std::vector<PairSample>& pairs);
std::vector<PairSample> pairs_from_json(const std::string& json_text);

}  // namespace nvs::dataset

namespace nvs::camera {

struct SceneScaleResult {
    std::vector<dataset::SceneManifest> scenes;
    std::vector<std::size_t> skipped;  // indices of scenes left untouched
};

/// Divide every frame translation of each scene by that scene's scalar
/// s = max over ordered frame pairs of the relative-translation norm,
/// clamped below at 1e-8. Scenes with fewer than two frames are skipped
/// with a warning. Idempotent.
SceneScaleResult normalize_scene_scale(const std::vector<dataset::SceneManifest>& scenes);

}  // namespace nvs::camera
