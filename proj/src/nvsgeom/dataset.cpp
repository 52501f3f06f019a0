#include "nvsgeom/dataset.hpp"

#include "nvsgeom/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nvs::dataset {

using nlohmann::json;

CameraIntrinsics FrameRecord::intrinsics_at(double width, double height) const {
    if (!(width > 0.0) || !(height > 0.0)) {
        fail(Status::invalid_argument, "intrinsics_at: resolution must be positive");
    }
    return {intrinsics.fx * width, intrinsics.fy * height,
            intrinsics.cx * width, intrinsics.cy * height, width, height};
}

const char* to_string(RangeLabel label) {
    switch (label) {
        case RangeLabel::training: return "training";
        case RangeLabel::mid: return "mid";
        case RangeLabel::longrange: return "long";
    }
    return "training";
}

RangeLabel range_label_from_string(const std::string& s) {
    if (s == "training" || s == "train") return RangeLabel::training;
    if (s == "mid") return RangeLabel::mid;
    if (s == "long") return RangeLabel::longrange;
    fail(Status::invalid_argument, "unknown range label: " + s);
}

namespace {

[[noreturn]] void parse_fail(const std::string& scene_id, std::size_t line_no, const std::string& what) {
    fail(Status::parse_error,
         "camera file '" + scene_id + "' line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

}  // namespace

SceneManifest parse_camera_file(const std::string& text, const std::string& scene_id) {
    SceneManifest scene;
    scene.scene_id = scene_id;

    std::vector<std::pair<std::size_t, std::string>> lines;  // (line number, content)
    {
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            ++line_no;
            if (line.find_first_not_of(" \t") != std::string::npos) {
                lines.emplace_back(line_no, std::move(line));
            }
            if (end == text.size()) break;
            start = end + 1;
        }
    }
    if (lines.empty()) fail(Status::parse_error, "camera file '" + scene_id + "': empty file");

    scene.source_uri = lines.front().second;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& [line_no, line] = lines[li];
        const std::vector<std::string> tokens = split_ws(line);
        if (tokens.size() != 19) {
            parse_fail(scene_id, line_no,
                       "expected 19 fields, got " + std::to_string(tokens.size()));
        }

        FrameRecord frame;
        {
            errno = 0;
            char* end = nullptr;
            const long long ts = std::strtoll(tokens[0].c_str(), &end, 10);
            if (errno != 0 || end == tokens[0].c_str() || *end != '\0') {
                parse_fail(scene_id, line_no, "bad timestamp '" + tokens[0] + "'");
            }
            frame.timestamp_us = ts;
        }

        double values[18];
        for (int i = 0; i < 18; ++i) {
            errno = 0;
            char* end = nullptr;
            values[i] = std::strtod(tokens[i + 1].c_str(), &end);
            if (errno != 0 || end == tokens[i + 1].c_str() || *end != '\0' ||
                !std::isfinite(values[i])) {
                parse_fail(scene_id, line_no, "bad value '" + tokens[i + 1] + "'");
            }
        }

        frame.intrinsics = {values[0], values[1], values[2], values[3], 1.0, 1.0};
        try {
            camera::validate_intrinsics(frame.intrinsics);
        } catch (const Error& e) {
            parse_fail(scene_id, line_no, e.what());
        }
        // values[4], values[5] are the file format's placeholder columns.

        Eigen::Matrix3d rot;
        Eigen::Vector3d t;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) rot(r, c) = values[6 + r * 4 + c];
            t(r) = values[6 + r * 4 + 3];
        }
        try {
            frame.extrinsics.rotation = camera::sanitize_rotation(rot);
        } catch (const Error& e) {
            parse_fail(scene_id, line_no, std::string("pose block: ") + e.what());
        }
        frame.extrinsics.translation = t;

        if (!scene.frames.empty() && frame.timestamp_us <= scene.frames.back().timestamp_us) {
            parse_fail(scene_id, line_no, "timestamps must be strictly increasing");
        }
        frame.frame_index = static_cast<int>(scene.frames.size());
        scene.frames.push_back(std::move(frame));
    }

    if (scene.frames.empty()) {
        fail(Status::parse_error, "camera file '" + scene_id + "': no frame lines");
    }
    return scene;
}

SceneManifest load_camera_file(const std::string& path, const std::string& scene_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Status::io_error, "cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_camera_file(buf.str(), scene_id);
}

std::string serialize_camera_file(const SceneManifest& scene) {
    std::string out = scene.source_uri + "\n";
    char num[40];
    for (const FrameRecord& f : scene.frames) {
        out += std::to_string(f.timestamp_us);
        const CameraIntrinsics& k = f.intrinsics;
        const double head[6] = {k.fx, k.fy, k.cx, k.cy, 0.0, 0.0};
        for (double v : head) {
            std::snprintf(num, sizeof(num), " %.17g", v);
            out += num;
        }
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                const double v = c < 3 ? f.extrinsics.rotation(r, c) : f.extrinsics.translation(r);
                std::snprintf(num, sizeof(num), " %.17g", v);
                out += num;
            }
        }
        out += '\n';
    }
    return out;
}

PairSample make_pair_sample(const SceneManifest& scene, int src, int dst,
                            RangeLabel label, double width, double height) {
    const int n = static_cast<int>(scene.frames.size());
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
        fail(Status::invalid_argument, "pair indices out of range");
    }
    PairSample pair;
    pair.scene_id = scene.scene_id;
    pair.src_index = src;
    pair.dst_index = dst;
    pair.range_label = label;
    pair.relative_pose = camera::relative_pose(scene.frames[src].extrinsics,
                                               scene.frames[dst].extrinsics);
    pair.k_src = scene.frames[src].intrinsics_at(width, height);
    pair.k_dst = scene.frames[dst].intrinsics_at(width, height);
    return pair;
}

PairSample sample_training_pair(const SceneManifest& scene, Rng& rng,
                                double width, double height) {
    const int n = static_cast<int>(scene.frames.size());
    if (n < 2) fail(Status::invalid_argument, "scene needs at least two frames");
    const int src = static_cast<int>(rng.uniform_below(n));
    int dst = static_cast<int>(rng.uniform_below(n - 1));
    if (dst >= src) ++dst;  // skip the diagonal; keeps ordered pairs uniform
    return make_pair_sample(scene, src, dst, RangeLabel::training, width, height);
}

namespace {

std::pair<int, int> gap_bounds(RangeLabel range) {
    switch (range) {
        case RangeLabel::mid: return {kMidGapMin, kMidGapMax};
        case RangeLabel::longrange: return {kLongGapMin, kLongGapMax};
        default: fail(Status::invalid_argument, "eval sampling requires a mid or long range");
    }
}

}  // namespace

std::vector<int> eval_destinations(const SceneManifest& scene, RangeLabel range, int src) {
    const auto [lo, hi] = gap_bounds(range);
    const int n = static_cast<int>(scene.frames.size());
    if (src < 0 || src >= n) fail(Status::invalid_argument, "source index out of range");
    std::vector<int> dsts;
    for (int d = std::max(0, src - hi); d <= std::min(n - 1, src + hi); ++d) {
        const int gap = std::abs(d - src);
        if (gap >= lo && gap <= hi) dsts.push_back(d);
    }
    return dsts;
}

std::vector<int> eval_sources(const SceneManifest& scene, RangeLabel range) {
    std::vector<int> srcs;
    for (int s = 0; s < static_cast<int>(scene.frames.size()); ++s) {
        if (!eval_destinations(scene, range, s).empty()) srcs.push_back(s);
    }
    return srcs;
}

std::optional<PairSample> sample_eval_pair_from(const SceneManifest& scene, RangeLabel range,
                                                int src, Rng& rng, double width, double height) {
    const std::vector<int> dsts = eval_destinations(scene, range, src);
    if (dsts.empty()) return std::nullopt;
    const int dst = dsts[rng.uniform_below(dsts.size())];
    return make_pair_sample(scene, src, dst, range, width, height);
}

std::optional<PairSample> sample_eval_pair(const SceneManifest& scene, RangeLabel range, Rng& rng,
                                           double width, double height) {
    const std::vector<int> srcs = eval_sources(scene, range);
    if (srcs.empty()) return std::nullopt;
    const int src = srcs[rng.uniform_below(srcs.size())];
    return sample_eval_pair_from(scene, range, src, rng, width, height);
}

encoding::EmbeddingStats compute_pose_stats(const std::vector<PairSample>& pairs) {
    if (pairs.empty()) fail(Status::invalid_argument, "pose stats over an empty pair stream");
    encoding::EmbeddingStatsAccumulator acc;
    for (const PairSample& pair : pairs) {
        acc.add(encoding::pose_embedding(camera::inverse(pair.relative_pose),
                                         pair.k_src, pair.k_dst));
    }
    return acc.finalize();
}

// --- JSON interchange ------------------------------------------------------

namespace {

json intrinsics_to_json(const CameraIntrinsics& k) {
    return json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
                {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
    return {j.at("fx").get<double>(), j.at("fy").get<double>(),
            j.at("cx").get<double>(), j.at("cy").get<double>(),
            j.at("width").get<double>(), j.at("height").get<double>()};
}

json pose_to_json(const RelativePose& pose) {
    std::vector<double> rot(9), t(3);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) rot[r * 3 + c] = pose.rotation(r, c);
        t[r] = pose.translation(r);
    }
    return json{{"rotation", rot}, {"translation", t}};
}

RelativePose pose_from_json(const json& j) {
    const auto rot = j.at("rotation").get<std::vector<double>>();
    const auto t = j.at("translation").get<std::vector<double>>();
    if (rot.size() != 9 || t.size() != 3) {
        fail(Status::parse_error, "pose JSON must hold 9 rotation and 3 translation entries");
    }
    RelativePose pose;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[r * 3 + c];
        pose.translation(r) = t[r];
    }
    return pose;
}

}  // namespace

SceneIndexEntry index_entry(const SceneManifest& scene, const std::string& path) {
    SceneIndexEntry e;
    e.scene_id = scene.scene_id;
    e.path = path;
    e.frame_count = scene.frames.size();
    e.timestamp_first = scene.frames.front().timestamp_us;
    e.timestamp_last = scene.frames.back().timestamp_us;
    return e;
}

std::string scene_index_to_json(const std::vector<SceneIndexEntry>& entries) {
    json scenes = json::array();
    for (const SceneIndexEntry& e : entries) {
        scenes.push_back(json{{"scene_id", e.scene_id},
                              {"path", e.path},
                              {"frame_count", e.frame_count},
                              {"timestamp_first", e.timestamp_first},
                              {"timestamp_last", e.timestamp_last}});
    }
    return json{{"scenes", scenes}}.dump(2);
}

std::vector<SceneIndexEntry> scene_index_from_json(const std::string& json_text) {
    std::vector<SceneIndexEntry> out;
    try {
        const json root = json::parse(json_text);
        for (const json& j : root.at("scenes")) {
            SceneIndexEntry e;
            e.scene_id = j.at("scene_id").get<std::string>();
            e.path = j.at("path").get<std::string>();
            e.frame_count = j.at("frame_count").get<std::size_t>();
            e.timestamp_first = j.at("timestamp_first").get<std::int64_t>();
            e.timestamp_last = j.at("timestamp_last").get<std::int64_t>();
            out.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        fail(Status::parse_error, std::string("scene index JSON: ") + e.what());
    }
    return out;
}

std::string pairs_to_json(const std::vector<PairSample>& pairs) {
    json arr = json::array();
    for (const PairSample& p : pairs) {
        arr.push_back(json{{"scene_id", p.scene_id},
                           {"src_index", p.src_index},
                           {"dst_index", p.dst_index},
                           {"range_label", to_string(p.range_label)},
                           {"relative_pose", pose_to_json(p.relative_pose)},
                           {"k_src", intrinsics_to_json(p.k_src)},
                           {"k_dst", intrinsics_to_json(p.k_dst)}});
    }
    return arr.dump(2);
}

std::vector<PairSample> pairs_from_json(const std::string& json_text) {
    std::vector<PairSample> out;
    try {
        const json root = json::parse(json_text);
        if (!root.is_array()) fail(Status::parse_error, "pair file must be a JSON array");
        for (const json& j : root) {
            PairSample p;
            p.scene_id = j.at("scene_id").get<std::string>();
            p.src_index = j.at("src_index").get<int>();
            p.dst_index = j.at("dst_index").get<int>();
            p.range_label = range_label_from_string(j.at("range_label").get<std::string>());
            p.relative_pose = pose_from_json(j.at("relative_pose"));
            p.k_src = intrinsics_from_json(j.at("k_src"));
            p.k_dst = intrinsics_from_json(j.at("k_dst"));
            out.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        fail(Status::parse_error, std::string("pair JSON: ") + e.what());
    }
    return out;
}

}  // namespace nvs::dataset

namespace nvs::camera {

SceneScaleResult normalize_scene_scale(const std::vector<dataset::SceneManifest>& scenes) {
    SceneScaleResult result;
    result.scenes = scenes;
    for (std::size_t si = 0; si < result.scenes.size(); ++si) {
        dataset::SceneManifest& scene = result.scenes[si];
        if (scene.frames.size() < 2) {
            NVS_LOG_WARN("scene '%s' has %zu frame(s); scale normalization skipped",
                         scene.scene_id.c_str(), scene.frames.size());
            result.skipped.push_back(si);
            continue;
        }
        double max_norm = 0.0;
        for (std::size_t i = 0; i < scene.frames.size(); ++i) {
            for (std::size_t j = 0; j < scene.frames.size(); ++j) {
                if (i == j) continue;
                const RelativePose rel = relative_pose(scene.frames[i].extrinsics,
                                                       scene.frames[j].extrinsics);
                max_norm = std::max(max_norm, rel.translation.norm());
            }
        }
        const double s = std::max(max_norm, 1e-8);
        for (dataset::FrameRecord& f : scene.frames) f.extrinsics.translation /= s;
    }
    return result;
}

}  // namespace nvs::camera
