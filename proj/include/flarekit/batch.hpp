#pragma once

#include "flarekit/synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace flarekit::batch {

/// One manifest line.
struct PairRecord {
    std::string scene;
    std::string flare;
    std::string composite;
    std::string scene_gt;
    std::string flare_gt;
    BlendMode mode = BlendMode::Convex;
    double p = 0.0;
    double q = 0.0;
    double sigma2 = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t pair_index = 0;

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Single-line JSON with the fixed field set
/// scene, flare, composite, scene_gt, flare_gt, mode, p, q, sigma2, gamma, seed, pair_index.
std::string to_json_line(const PairRecord& record);
/// Throws FormatError on malformed or incomplete input.
PairRecord parse_json_line(const std::string& line);

std::vector<PairRecord> read_manifest(const std::filesystem::path& path);

/// PNG files directly inside `dir`, sorted by file name.
/// Throws IoError if `dir` is not a readable directory.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// (scene index, flare index) for a pair, drawn with replacement from the
/// selection sub-stream of the pair seed.
std::pair<std::size_t, std::size_t> select_pair(std::uint64_t pair_seed, std::size_t num_scenes,
                                                std::size_t num_flares);

struct SynthJob {
    std::filesystem::path scenes_dir;
    std::filesystem::path flares_dir;
    std::filesystem::path out_dir;
    std::uint64_t count = 0;
    std::uint64_t master_seed = 0;
    SamplingPolicy policy;
    unsigned jobs = 1;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

/// Generates `count` pairs into out_dir/{composite,scene_gt,flare_gt}/NNNNNN.png
/// and writes out_dir/manifest.jsonl in pair-index order. Output is identical
/// for any `jobs`. Throws ParameterError for empty input directories and
/// IoError when the output cannot be written. Returns the manifest path.
std::filesystem::path run_synthesis(const SynthJob& job);

struct EvalRow {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
};

/// Pairs PNG/PFM files of `pred_dir` and `gt_dir` by file name and scores
/// each pair in linear space. Files without a counterpart are skipped.
std::vector<EvalRow> evaluate_dirs(const std::filesystem::path& pred_dir,
                                   const std::filesystem::path& gt_dir, double gamma);

} // namespace flarekit::batch
