// nvsgeom command-line tool. Talks to the engine exclusively through the
// shared library's C API (nvsgeom/nvsgeom.h); everything here is argument
// parsing, file orchestration, and run-manifest bookkeeping.

#include <nvsgeom/nvsgeom.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 input error, 2 numeric/degenerate failure.
struct CliError {
    int code;
    std::string message;
};

int exit_code_for(nvs_status status) {
    switch (status) {
        case NVS_OK: return 0;
        case NVS_ERR_DEGENERATE:
        case NVS_ERR_NUMERIC: return 2;
        default: return 1;
    }
}

void check(nvs_status status, const std::string& context) {
    if (status != NVS_OK) {
        throw CliError{exit_code_for(status), context + ": " + nvs_last_error()};
    }
}

// RAII wrappers over the opaque handles.
using TensorPtr = std::unique_ptr<nvs_tensor, decltype(&nvs_tensor_destroy)>;
using ImagePtr = std::unique_ptr<nvs_image, decltype(&nvs_image_destroy)>;
using ScenesPtr = std::unique_ptr<nvs_scene_list, decltype(&nvs_scene_list_destroy)>;
using PairsPtr = std::unique_ptr<nvs_pair_list, decltype(&nvs_pair_list_destroy)>;
using RngPtr = std::unique_ptr<nvs_rng, decltype(&nvs_rng_destroy)>;

TensorPtr wrap(nvs_tensor* t) { return TensorPtr(t, &nvs_tensor_destroy); }
ImagePtr wrap(nvs_image* i) { return ImagePtr(i, &nvs_image_destroy); }

std::string take_string(char* s) {
    std::string out = s ? s : "";
    nvs_string_free(s);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{1, "cannot open: " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{1, "cannot write: " + path};
    out << content;
    if (!out) throw CliError{1, "write failed: " + path};
}

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{1, "cannot hash missing input: " + path};
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
    return hex;
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{1, "cannot create output directory: " + dir};
}

// Every output directory carries a run manifest sufficient to re-run the
// command: argv, seed, input hashes, library version, timestamp.
void write_manifest(const std::string& outdir, const std::vector<std::string>& argv,
                    std::optional<std::uint64_t> seed, const std::vector<std::string>& inputs,
                    json extras = json::object()) {
    json manifest;
    manifest["command"] = argv;
    if (seed) manifest["seed"] = *seed;
    json hashes = json::object();
    for (const std::string& path : inputs) hashes[path] = fnv1a64_file(path);
    manifest["input_hashes"] = hashes;
    manifest["library_version"] = nvs_version();
    manifest["timestamp"] = iso8601_now();
    for (auto& [key, value] : extras.items()) manifest[key] = value;
    write_file(outdir + "/run_manifest.json", manifest.dump(2) + "\n");
}

std::pair<int, int> parse_extent(const std::string& text, const std::string& what) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw CliError{1, what + " must look like \"8x8\""};
    try {
        const int a = std::stoi(text.substr(0, x));
        const int b = std::stoi(text.substr(x + 1));
        if (a <= 0 || b <= 0) throw std::invalid_argument("non-positive");
        return {a, b};
    } catch (const std::exception&) {
        throw CliError{1, what + ": cannot parse '" + text + "'"};
    }
}

std::vector<double> parse_per_head(const std::string& text, std::size_t heads,
                                   const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw CliError{1, what + ": cannot parse '" + tok + "'"};
        }
    }
    if (values.size() == 1) values.assign(heads, values[0]);
    if (values.size() != heads) {
        throw CliError{1, what + ": expected 1 or " + std::to_string(heads) + " values"};
    }
    return values;
}

json pose_json(const nvs_pose& pose) {
    return json{{"rotation", std::vector<double>(pose.rotation, pose.rotation + 9)},
                {"translation", std::vector<double>(pose.translation, pose.translation + 3)}};
}

json intrinsics_json(const nvs_intrinsics& k) {
    return json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
                {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

// Runs fn(0..n-1) on `jobs` threads. Items must be independent; outputs may
// not depend on the job count.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::optional<CliError> first_error;
    auto worker = [&] {
        while (!failed) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (const CliError& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = e;
                failed = true;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = CliError{2, e.what()};
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) throw *first_error;
}

std::vector<std::string> list_files(const std::string& dir, const std::string& ext) {
    if (!fs::is_directory(dir)) throw CliError{1, "not a directory: " + dir};
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

/* ------------------------------------------------------------------------ */

struct IndexArgs {
    std::string input;
    std::string output;
    bool skip_bad = false;
};

void run_index(const IndexArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_scene_list* scenes_raw = nullptr;
    std::size_t skipped = 0;
    check(nvs_scene_list_load_dir(a.input.c_str(), a.skip_bad ? 1 : 0, &scenes_raw, &skipped),
          "index");
    ScenesPtr scenes(scenes_raw, &nvs_scene_list_destroy);

    char* json_raw = nullptr;
    check(nvs_scene_list_index_json(scenes.get(), &json_raw), "index");
    write_file(a.output + "/index.json", take_string(json_raw) + "\n");

    write_manifest(a.output, argv, std::nullopt, list_files(a.input, ".txt"),
                   json{{"scene_count", nvs_scene_list_count(scenes.get())},
                        {"skipped_files", skipped}});
    if (skipped > 0) {
        std::fprintf(stderr, "index: skipped %zu malformed file(s)\n", skipped);
    }
}

struct SamplePairsArgs {
    std::string index;
    std::string range = "train";
    std::size_t count = 0;
    std::uint64_t seed = 0;
    double width = 256.0;
    double height = 256.0;
    std::string output;
};

void run_sample_pairs(const SamplePairsArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_scene_list* scenes_raw = nullptr;
    check(nvs_scene_list_load_index(a.index.c_str(), &scenes_raw), "sample-pairs");
    ScenesPtr scenes(scenes_raw, &nvs_scene_list_destroy);

    nvs_pair_list* pairs_raw = nullptr;
    int with_replacement = 0;
    check(nvs_sample_pairs(scenes.get(), a.range.c_str(), a.count, a.width, a.height, a.seed,
                           &pairs_raw, &with_replacement),
          "sample-pairs");
    PairsPtr pairs(pairs_raw, &nvs_pair_list_destroy);

    char* json_raw = nullptr;
    check(nvs_pair_list_to_json(pairs.get(), &json_raw), "sample-pairs");
    write_file(a.output + "/pairs.json", take_string(json_raw) + "\n");

    write_manifest(a.output, argv, a.seed, {a.index},
                   json{{"range", a.range},
                        {"count", a.count},
                        {"width", a.width},
                        {"height", a.height},
                        {"with_replacement", with_replacement != 0}});
}

struct EpibiasArgs {
    std::string pairs;
    std::string grid_dst = "8x8";
    std::string grid_src = "8x8";
    std::string image_size = "256x256";
    std::size_t heads = 4;
    std::string m = "0", tau = "0", c = "0", b = "0";
    bool save_distances = false;
    std::string output;
    unsigned jobs = 1;
};

void run_epibias(const EpibiasArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    // Plain locals (not structured bindings): the worker lambda captures them.
    const std::pair<int, int> grid_dst = parse_extent(a.grid_dst, "--grid-dst");
    const std::pair<int, int> grid_src = parse_extent(a.grid_src, "--grid-src");
    const std::pair<int, int> image_size = parse_extent(a.image_size, "--image-size");
    const int dst_rows = grid_dst.first, dst_cols = grid_dst.second;
    const int src_rows = grid_src.first, src_cols = grid_src.second;
    const int img_h = image_size.first, img_w = image_size.second;
    const std::vector<double> m = parse_per_head(a.m, a.heads, "--m");
    const std::vector<double> tau = parse_per_head(a.tau, a.heads, "--tau");
    const std::vector<double> c = parse_per_head(a.c, a.heads, "--c");
    const std::vector<double> b = parse_per_head(a.b, a.heads, "--b");

    nvs_pair_list* pairs_raw = nullptr;
    check(nvs_pair_list_from_json(read_file(a.pairs).c_str(), &pairs_raw), "epibias");
    PairsPtr pairs(pairs_raw, &nvs_pair_list_destroy);
    const std::size_t n = nvs_pair_list_count(pairs.get());
    if (n == 0) throw CliError{1, "epibias: pair file is empty"};

    std::vector<char> degenerate(n, 0);
    parallel_for(n, a.jobs, [&](std::size_t i) {
        nvs_pose pose;
        nvs_intrinsics k_src, k_dst;
        check(nvs_pair_list_geometry(pairs.get(), i, &pose, &k_src, &k_dst), "epibias");

        char name[64];
        std::snprintf(name, sizeof(name), "/bias_%05zu.nvst", i);

        double f[9];
        const nvs_status fstatus = nvs_fundamental_matrix(&k_src, &k_dst, &pose, f);
        if (fstatus == NVS_ERR_DEGENERATE) {
            // Pure rotation: the additive bias falls back to its neutral
            // element, an all-zero tensor.
            degenerate[i] = 1;
            const uint32_t dims[3] = {static_cast<uint32_t>(a.heads),
                                      static_cast<uint32_t>(dst_rows * dst_cols),
                                      static_cast<uint32_t>(src_rows * src_cols)};
            nvs_tensor* zeros_raw = nullptr;
            check(nvs_tensor_create(dims, 3, &zeros_raw), "epibias");
            auto zeros = wrap(zeros_raw);
            check(nvs_tensor_save(zeros.get(), (a.output + name).c_str()), "epibias");
            return;
        }
        check(fstatus, "epibias: fundamental matrix");

        nvs_tensor* dist_raw = nullptr;
        uint32_t degenerate_rows = 0;
        check(nvs_epipolar_distance_matrix(f, dst_rows, dst_cols, src_rows, src_cols, img_h,
                                           img_w, &dist_raw, &degenerate_rows),
              "epibias: distance matrix");
        auto dist = wrap(dist_raw);
        if (a.save_distances) {
            char dist_name[64];
            std::snprintf(dist_name, sizeof(dist_name), "/distance_%05zu.nvst", i);
            check(nvs_tensor_save(dist.get(), (a.output + dist_name).c_str()), "epibias");
        }

        nvs_tensor* bias_raw = nullptr;
        check(nvs_attention_bias(dist.get(), m.data(), tau.data(), c.data(), b.data(),
                                 static_cast<uint32_t>(a.heads), &bias_raw),
              "epibias: attention bias");
        auto bias = wrap(bias_raw);
        check(nvs_tensor_save(bias.get(), (a.output + name).c_str()), "epibias");
    });

    json degenerate_list = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (degenerate[i]) degenerate_list.push_back(i);
    }
    write_manifest(a.output, argv, std::nullopt, {a.pairs},
                   json{{"pair_count", n},
                        {"heads", a.heads},
                        {"grid_dst", a.grid_dst},
                        {"grid_src", a.grid_src},
                        {"image_size", a.image_size},
                        {"degenerate_pairs", degenerate_list}});
}

struct PoseEmbedArgs {
    std::string pairs;
    std::string output;
    std::string stats_in;
    bool stats_out = false;
    bool normalize = false;
};

void run_pose_embed(const PoseEmbedArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_pair_list* pairs_raw = nullptr;
    check(nvs_pair_list_from_json(read_file(a.pairs).c_str(), &pairs_raw), "pose-embed");
    PairsPtr pairs(pairs_raw, &nvs_pair_list_destroy);
    const std::size_t n = nvs_pair_list_count(pairs.get());
    if (n == 0) throw CliError{1, "pose-embed: pair file is empty"};

    nvs_embedding_stats stats{};
    bool have_stats = false;
    if (!a.stats_in.empty()) {
        const json j = json::parse(read_file(a.stats_in));
        const auto mean = j.at("mean").get<std::vector<double>>();
        const auto std_dev = j.at("std").get<std::vector<double>>();
        if (mean.size() != 20 || std_dev.size() != 20) {
            throw CliError{1, "pose-embed: stats file must hold 20-element mean/std"};
        }
        std::copy(mean.begin(), mean.end(), stats.mean);
        std::copy(std_dev.begin(), std_dev.end(), stats.std_dev);
        have_stats = true;
    } else if (a.normalize || a.stats_out) {
        check(nvs_compute_pose_stats(pairs.get(), &stats), "pose-embed: stats");
        have_stats = true;
    }

    const uint32_t dims[2] = {static_cast<uint32_t>(n), 20};
    nvs_tensor* emb_raw = nullptr;
    check(nvs_tensor_create(dims, 2, &emb_raw), "pose-embed");
    auto embeddings = wrap(emb_raw);
    float* out = nvs_tensor_data(embeddings.get());

    for (std::size_t i = 0; i < n; ++i) {
        nvs_pose pose;
        nvs_intrinsics k_src, k_dst;
        check(nvs_pair_list_geometry(pairs.get(), i, &pose, &k_src, &k_dst), "pose-embed");
        nvs_pose inverse;
        check(nvs_pose_inverse(&pose, &inverse), "pose-embed");
        double e[20];
        check(nvs_pose_embedding(&inverse, &k_src, &k_dst, e), "pose-embed");
        if (a.normalize) {
            double norm[20];
            check(nvs_normalize_embedding(e, &stats, norm), "pose-embed");
            std::copy(norm, norm + 20, e);
        }
        for (int j = 0; j < 20; ++j) out[i * 20 + j] = static_cast<float>(e[j]);
    }
    check(nvs_tensor_save(embeddings.get(), (a.output + "/embeddings.nvst").c_str()), "pose-embed");

    if (a.stats_out && have_stats) {
        write_file(a.output + "/stats.json",
                   json{{"mean", std::vector<double>(stats.mean, stats.mean + 20)},
                        {"std", std::vector<double>(stats.std_dev, stats.std_dev + 20)}}
                           .dump(2) +
                       "\n");
    }
    std::vector<std::string> inputs{a.pairs};
    if (!a.stats_in.empty()) inputs.push_back(a.stats_in);
    write_manifest(a.output, argv, std::nullopt, inputs,
                   json{{"pair_count", n}, {"normalized", a.normalize}});
}

struct DepthWarpArgs {
    std::string depth;
    std::string pairs;
    std::size_t pair_index = 0;
    std::string out_size;  // empty = depth extent
    unsigned channels = 128;
    std::string output;
};

void run_depth_warp(const DepthWarpArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_tensor* depth_raw = nullptr;
    check(nvs_tensor_load(a.depth.c_str(), &depth_raw), "depth-warp");
    auto depth = wrap(depth_raw);
    if (nvs_tensor_rank(depth.get()) != 2) throw CliError{1, "depth-warp: depth must be (H, W)"};
    const uint32_t depth_h = nvs_tensor_dim(depth.get(), 0);
    const uint32_t depth_w = nvs_tensor_dim(depth.get(), 1);

    nvs_pair_list* pairs_raw = nullptr;
    check(nvs_pair_list_from_json(read_file(a.pairs).c_str(), &pairs_raw), "depth-warp");
    PairsPtr pairs(pairs_raw, &nvs_pair_list_destroy);
    if (a.pair_index >= nvs_pair_list_count(pairs.get())) {
        throw CliError{1, "depth-warp: --pair-index out of range"};
    }
    nvs_pose pose;
    nvs_intrinsics k_src, k_dst;
    check(nvs_pair_list_geometry(pairs.get(), a.pair_index, &pose, &k_src, &k_dst), "depth-warp");

    uint32_t out_h = depth_h, out_w = depth_w;
    if (!a.out_size.empty()) {
        const auto [h, w] = parse_extent(a.out_size, "--out-size");
        out_h = static_cast<uint32_t>(h);
        out_w = static_cast<uint32_t>(w);
    }

    nvs_tensor* norm_raw = nullptr;
    check(nvs_normalize_depth(depth.get(), &norm_raw), "depth-warp: normalize");
    auto normalized = wrap(norm_raw);
    check(nvs_tensor_save(normalized.get(), (a.output + "/normalized_depth.nvst").c_str()),
          "depth-warp");

    nvs_tensor* grid_raw = nullptr;
    check(nvs_warp_coordinates(depth.get(), &k_src, &k_dst, &pose, out_h, out_w, &grid_raw),
          "depth-warp: warp");
    auto grid = wrap(grid_raw);
    check(nvs_tensor_save(grid.get(), (a.output + "/grid.nvst").c_str()), "depth-warp");

    nvs_tensor* fourier_dst_raw = nullptr;
    check(nvs_fourier_features(grid.get(), depth_w, depth_h, a.channels, &fourier_dst_raw),
          "depth-warp: fourier");
    auto fourier_dst = wrap(fourier_dst_raw);
    check(nvs_tensor_save(fourier_dst.get(), (a.output + "/fourier_dst.nvst").c_str()),
          "depth-warp");

    // Encoder-side companion: features of the untouched source grid.
    nvs_tensor* id_raw = nullptr;
    check(nvs_identity_grid(depth_h, depth_w, &id_raw), "depth-warp");
    auto identity = wrap(id_raw);
    nvs_tensor* fourier_src_raw = nullptr;
    check(nvs_fourier_features(identity.get(), depth_w, depth_h, a.channels, &fourier_src_raw),
          "depth-warp: fourier");
    auto fourier_src = wrap(fourier_src_raw);
    check(nvs_tensor_save(fourier_src.get(), (a.output + "/fourier_src.nvst").c_str()),
          "depth-warp");

    write_manifest(a.output, argv, std::nullopt, {a.depth, a.pairs},
                   json{{"pair_index", a.pair_index},
                        {"channels", a.channels},
                        {"out_size", std::to_string(out_h) + "x" + std::to_string(out_w)}});
}

struct AugmentArgs {
    std::string input;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    unsigned resolution = 256;
    std::string output;
    unsigned jobs = 1;
};

void run_augment(const AugmentArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    const std::vector<std::string> images = list_files(a.input, ".png");
    if (images.empty()) throw CliError{1, "augment: no .png images under " + a.input};

    // Pre-resize each distinct source image once.
    std::vector<ImagePtr> prepared;
    prepared.reserve(images.size());
    for (const std::string& path : images) {
        nvs_image* raw = nullptr;
        check(nvs_image_load_png(path.c_str(), &raw), "augment: " + path);
        auto img = wrap(raw);
        nvs_image* squared = nullptr;
        check(nvs_image_prepare_square(img.get(), 512, &squared), "augment: " + path);
        prepared.push_back(wrap(squared));
    }

    std::vector<char> succeeded(a.count, 0);
    parallel_for(a.count, a.jobs, [&](std::size_t i) {
        const nvs_image* source = prepared[i % prepared.size()].get();
        const std::uint64_t item_seed = nvs_rng_derive(a.seed, i);
        RngPtr rng(nvs_rng_create(item_seed), &nvs_rng_destroy);

        nvs_image *src_raw = nullptr, *dst_raw = nullptr;
        nvs_pose pose;
        nvs_intrinsics k;
        nvs_augment_info info;
        const nvs_status status = nvs_augment_pair(source, rng.get(), a.resolution, &src_raw,
                                                   &dst_raw, &pose, &k, &info);
        if (status == NVS_ERR_NUMERIC) {
            std::fprintf(stderr, "augment: item %zu failed after 10 attempts, skipping\n", i);
            return;
        }
        check(status, "augment");
        auto src = wrap(src_raw);
        auto dst = wrap(dst_raw);

        char stem[64];
        std::snprintf(stem, sizeof(stem), "/pair_%05zu", i);
        const std::string base = a.output + stem;
        check(nvs_image_save_png(src.get(), (base + "_src.png").c_str()), "augment");
        check(nvs_image_save_png(dst.get(), (base + "_dst.png").c_str()), "augment");

        const json sidecar{{"source_image", images[i % images.size()]},
                           {"seed", item_seed},
                           {"regime", info.regime == 0 ? "narrow" : "wide"},
                           {"crop", info.crop},
                           {"attempts", info.attempts},
                           {"angles_deg",
                            json{{"src", {info.yaw_src, info.pitch_src, info.roll_src}},
                                 {"dst", {info.yaw_dst, info.pitch_dst, info.roll_dst}}}},
                           {"relative_pose", pose_json(pose)},
                           {"intrinsics", intrinsics_json(k)},
                           {"model_resolution", a.resolution}};
        write_file(base + ".json", sidecar.dump(2) + "\n");
        succeeded[i] = 1;
    });

    std::size_t failures = 0;
    for (char ok : succeeded) {
        if (!ok) ++failures;
    }
    write_manifest(a.output, argv, a.seed, images,
                   json{{"requested", a.count},
                        {"succeeded", a.count - failures},
                        {"failed", failures},
                        {"resolution", a.resolution}});
    if (failures == a.count) throw CliError{2, "augment: zero successful pairs"};
}

struct SampleArgs {
    std::string denoiser = "gaussian";
    double mu = 0.0;
    double sigma_data = 1.0;
    unsigned dim = 16;
    std::size_t count = 1;
    int steps = 32;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    std::uint64_t seed = 0;
    std::string output;
};

int constant_denoiser_cb(void* user, const double*, size_t n, double, double* out) {
    const double x0 = *static_cast<const double*>(user);
    for (size_t i = 0; i < n; ++i) out[i] = x0;
    return 0;
}

void run_sample(const SampleArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    TensorPtr samples(nullptr, &nvs_tensor_destroy);
    if (a.denoiser == "gaussian") {
        nvs_tensor* raw = nullptr;
        check(nvs_edm_sample_gaussian(a.steps, a.sigma_min, a.sigma_max, a.rho, a.mu,
                                      a.sigma_data, a.dim, static_cast<uint32_t>(a.count),
                                      a.seed, &raw),
              "sample");
        samples = wrap(raw);
    } else if (a.denoiser == "constant") {
        const uint32_t dims[2] = {static_cast<uint32_t>(a.count), a.dim};
        nvs_tensor* raw = nullptr;
        check(nvs_tensor_create(dims, 2, &raw), "sample");
        samples = wrap(raw);
        float* out = nvs_tensor_data(samples.get());
        RngPtr rng(nvs_rng_create(a.seed), &nvs_rng_destroy);
        std::vector<double> init(a.dim), result(a.dim);
        double x0 = a.mu;
        for (std::size_t i = 0; i < a.count; ++i) {
            for (unsigned j = 0; j < a.dim; ++j) init[j] = a.sigma_max * nvs_rng_normal(rng.get());
            check(nvs_edm_sample(&constant_denoiser_cb, &x0, a.steps, a.sigma_min, a.sigma_max,
                                 a.rho, init.data(), a.dim, result.data()),
                  "sample");
            for (unsigned j = 0; j < a.dim; ++j) out[i * a.dim + j] = static_cast<float>(result[j]);
        }
    } else {
        throw CliError{1, "sample: unknown denoiser '" + a.denoiser + "' (gaussian|constant)"};
    }
    check(nvs_tensor_save(samples.get(), (a.output + "/samples.nvst").c_str()), "sample");
    write_manifest(a.output, argv, a.seed, {},
                   json{{"denoiser", a.denoiser},
                        {"mu", a.mu},
                        {"sigma_data", a.sigma_data},
                        {"dim", a.dim},
                        {"count", a.count},
                        {"steps", a.steps},
                        {"sigma_min", a.sigma_min},
                        {"sigma_max", a.sigma_max},
                        {"rho", a.rho}});
}

struct EvalArgs {
    std::string features_a;
    std::string features_b;
    bool paired = false;
    std::string src_a;
    std::string src_b;
    std::string output;
};

void run_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_tensor* a_raw = nullptr;
    check(nvs_tensor_load(a.features_a.c_str(), &a_raw), "eval");
    auto fa = wrap(a_raw);
    nvs_tensor* b_raw = nullptr;
    check(nvs_tensor_load(a.features_b.c_str(), &b_raw), "eval");
    auto fb = wrap(b_raw);

    double fd = 0.0;
    check(nvs_frechet_distance(fa.get(), fb.get(), &fd), "eval: frechet");

    json report{{"fd", fd},
                {"n_a", nvs_tensor_dim(fa.get(), 0)},
                {"n_b", nvs_tensor_dim(fb.get(), 0)},
                {"d", nvs_tensor_dim(fa.get(), 1)},
                {"covariance_normalization", "sample (n-1)"}};

    std::vector<std::string> inputs{a.features_a, a.features_b};
    if (a.paired) {
        if (a.src_a.empty() || a.src_b.empty()) {
            throw CliError{1, "eval: --paired requires --src-a and --src-b"};
        }
        nvs_tensor* sa_raw = nullptr;
        check(nvs_tensor_load(a.src_a.c_str(), &sa_raw), "eval");
        auto sa = wrap(sa_raw);
        nvs_tensor* sb_raw = nullptr;
        check(nvs_tensor_load(a.src_b.c_str(), &sb_raw), "eval");
        auto sb = wrap(sb_raw);
        double jfd = 0.0;
        check(nvs_joint_frechet_distance(sa.get(), fa.get(), sb.get(), fb.get(), &jfd),
              "eval: joint frechet");
        report["jfd"] = jfd;
        inputs.push_back(a.src_a);
        inputs.push_back(a.src_b);
    }
    write_file(a.output + "/report.json", report.dump(2) + "\n");
    write_manifest(a.output, argv, std::nullopt, inputs);
}

struct PsnrArgs {
    std::string a;
    std::string b;
    std::string output;
};

void run_psnr(const PsnrArgs& a, const std::vector<std::string>& argv) {
    ensure_dir(a.output);
    nvs_image* a_raw = nullptr;
    check(nvs_image_load_png(a.a.c_str(), &a_raw), "psnr");
    auto img_a = wrap(a_raw);
    nvs_image* b_raw = nullptr;
    check(nvs_image_load_png(a.b.c_str(), &b_raw), "psnr");
    auto img_b = wrap(b_raw);

    double db = 0.0;
    check(nvs_psnr(img_a.get(), img_b.get(), &db), "psnr");

    // JSON has no infinity; identical images report the string "inf".
    json report;
    if (std::isinf(db)) {
        report["psnr_db"] = "inf";
    } else {
        report["psnr_db"] = db;
    }
    write_file(a.output + "/psnr.json", report.dump(2) + "\n");
    write_manifest(a.output, argv, std::nullopt, {a.a, a.b});
    std::printf("%s\n", std::isinf(db) ? "inf" : std::to_string(db).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> argv_copy(argv, argv + argc);

    CLI::App app{"nvsgeom: multi-view geometry and data pipeline tool"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nvs_version()));

    IndexArgs index_args;
    auto* cmd_index = app.add_subcommand("index", "Index a directory of camera files");
    cmd_index->add_option("--input", index_args.input, "Directory of *.txt camera files")
        ->required();
    cmd_index->add_option("--output", index_args.output, "Output directory")->required();
    cmd_index->add_flag("--skip-bad", index_args.skip_bad, "Skip malformed files with a warning");

    SamplePairsArgs sp_args;
    auto* cmd_sp = app.add_subcommand("sample-pairs", "Sample source/target view pairs");
    cmd_sp->add_option("--index", sp_args.index, "index.json from the index command")->required();
    cmd_sp->add_option("--range", sp_args.range, "train | mid | long")->required();
    cmd_sp->add_option("--count", sp_args.count, "Number of pairs")->required();
    cmd_sp->add_option("--seed", sp_args.seed, "RNG seed")->default_val(0);
    cmd_sp->add_option("--width", sp_args.width, "Intrinsics width (px)")->default_val(256.0);
    cmd_sp->add_option("--height", sp_args.height, "Intrinsics height (px)")->default_val(256.0);
    cmd_sp->add_option("--output", sp_args.output, "Output directory")->required();

    EpibiasArgs eb_args;
    auto* cmd_eb = app.add_subcommand("epibias", "Epipolar attention bias tensors per pair");
    cmd_eb->add_option("--pairs", eb_args.pairs, "pairs.json")->required();
    cmd_eb->add_option("--grid-dst", eb_args.grid_dst, "Destination token grid, e.g. 8x8");
    cmd_eb->add_option("--grid-src", eb_args.grid_src, "Source token grid, e.g. 8x8");
    cmd_eb->add_option("--image-size", eb_args.image_size, "Image extent HxW, e.g. 256x256");
    cmd_eb->add_option("--heads", eb_args.heads, "Attention heads")->default_val(4);
    cmd_eb->add_option("--m", eb_args.m, "Amplitude per head (single value or comma list)");
    cmd_eb->add_option("--tau", eb_args.tau, "Temperature per head");
    cmd_eb->add_option("--c", eb_args.c, "Cutoff per head (pixels)");
    cmd_eb->add_option("--b", eb_args.b, "Bias per head");
    cmd_eb->add_flag("--save-distances", eb_args.save_distances,
                     "Also write the epipolar distance tensors");
    cmd_eb->add_option("--output", eb_args.output, "Output directory")->required();
    cmd_eb->add_option("--jobs", eb_args.jobs, "Worker threads")->default_val(1);

    PoseEmbedArgs pe_args;
    auto* cmd_pe = app.add_subcommand("pose-embed", "20-element pose embeddings for a pair file");
    cmd_pe->add_option("--pairs", pe_args.pairs, "pairs.json")->required();
    cmd_pe->add_option("--output", pe_args.output, "Output directory")->required();
    cmd_pe->add_option("--stats-in", pe_args.stats_in, "Precomputed stats JSON");
    cmd_pe->add_flag("--stats-out", pe_args.stats_out, "Also write stats.json");
    cmd_pe->add_flag("--normalize", pe_args.normalize, "Normalize embeddings with the stats");

    DepthWarpArgs dw_args;
    auto* cmd_dw = app.add_subcommand("depth-warp", "Depth-based coordinate warp + Fourier maps");
    cmd_dw->add_option("--depth", dw_args.depth, "Depth tensor (H, W) in NVST format")->required();
    cmd_dw->add_option("--pairs", dw_args.pairs, "pairs.json supplying the geometry")->required();
    cmd_dw->add_option("--pair-index", dw_args.pair_index, "Which pair to use")->default_val(0);
    cmd_dw->add_option("--out-size", dw_args.out_size, "Grid extent HxW (default: depth extent)");
    cmd_dw->add_option("--channels", dw_args.channels, "Fourier channels")->default_val(128);
    cmd_dw->add_option("--output", dw_args.output, "Output directory")->required();

    AugmentArgs aug_args;
    auto* cmd_aug = app.add_subcommand("augment", "Rotation-only homography pair augmentation");
    cmd_aug->add_option("--input", aug_args.input, "Directory of PNG images")->required();
    cmd_aug->add_option("--count", aug_args.count, "Pairs to produce")->required();
    cmd_aug->add_option("--seed", aug_args.seed, "RNG seed")->default_val(0);
    cmd_aug->add_option("--resolution", aug_args.resolution, "Model resolution")->default_val(256);
    cmd_aug->add_option("--output", aug_args.output, "Output directory")->required();
    cmd_aug->add_option("--jobs", aug_args.jobs, "Worker threads")->default_val(1);

    SampleArgs s_args;
    auto* cmd_s = app.add_subcommand("sample", "Run the deterministic ODE sampler");
    cmd_s->add_option("--denoiser", s_args.denoiser, "gaussian | constant")->default_val("gaussian");
    cmd_s->add_option("--mu", s_args.mu, "Target mean")->default_val(0.0);
    cmd_s->add_option("--sigma-data", s_args.sigma_data, "Target std (gaussian)")->default_val(1.0);
    cmd_s->add_option("--dim", s_args.dim, "Sample dimension")->default_val(16);
    cmd_s->add_option("--count", s_args.count, "Trajectories")->default_val(1);
    cmd_s->add_option("--steps", s_args.steps, "Sampler steps")->default_val(32);
    cmd_s->add_option("--sigma-min", s_args.sigma_min, "Schedule floor")->default_val(0.002);
    cmd_s->add_option("--sigma-max", s_args.sigma_max, "Schedule ceiling")->default_val(80.0);
    cmd_s->add_option("--rho", s_args.rho, "Schedule exponent")->default_val(7.0);
    cmd_s->add_option("--seed", s_args.seed, "RNG seed")->default_val(0);
    cmd_s->add_option("--output", s_args.output, "Output directory")->required();

    EvalArgs ev_args;
    auto* cmd_ev = app.add_subcommand("eval", "Frechet-distance evaluation over feature files");
    cmd_ev->add_option("--features-a", ev_args.features_a, "(n, d) NVST tensor")->required();
    cmd_ev->add_option("--features-b", ev_args.features_b, "(n, d) NVST tensor")->required();
    cmd_ev->add_flag("--paired", ev_args.paired, "Also compute the joint (paired) distance");
    cmd_ev->add_option("--src-a", ev_args.src_a, "Aligned source features for set A");
    cmd_ev->add_option("--src-b", ev_args.src_b, "Aligned source features for set B");
    cmd_ev->add_option("--output", ev_args.output, "Output directory")->required();

    PsnrArgs ps_args;
    auto* cmd_ps = app.add_subcommand("psnr", "PSNR between two PNG images");
    cmd_ps->add_option("--a", ps_args.a, "First image")->required();
    cmd_ps->add_option("--b", ps_args.b, "Second image")->required();
    cmd_ps->add_option("--output", ps_args.output, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_index) run_index(index_args, argv_copy);
        if (*cmd_sp) run_sample_pairs(sp_args, argv_copy);
        if (*cmd_eb) run_epibias(eb_args, argv_copy);
        if (*cmd_pe) run_pose_embed(pe_args, argv_copy);
        if (*cmd_dw) run_depth_warp(dw_args, argv_copy);
        if (*cmd_aug) run_augment(aug_args, argv_copy);
        if (*cmd_s) run_sample(s_args, argv_copy);
        if (*cmd_ev) run_eval(ev_args, argv_copy);
        if (*cmd_ps) run_psnr(ps_args, argv_copy);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
