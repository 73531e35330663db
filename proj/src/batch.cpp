#include "flarekit/batch.hpp"

#include "flarekit/errors.hpp"
#include "flarekit/io.hpp"
#include "flarekit/metrics.hpp"
#include "flarekit/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace flarekit::batch {

namespace {

std::string lower_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::vector<fs::path> list_with_extensions(const fs::path& dir, const std::set<std::string>& exts) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError("'" + dir.string() + "' is not a readable directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && exts.count(lower_extension(entry.path()))) {
            files.push_back(entry.path());
        }
    }
    if (ec) throw IoError("cannot list '" + dir.string() + "': " + ec.message());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

std::string index_name(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06llu.png", static_cast<unsigned long long>(index));
    return buf;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'" +
                      (ec ? ": " + ec.message() : std::string()));
    }
}

} // namespace

std::string to_json_line(const PairRecord& r) {
    // ordered_json keeps the documented field order in the file.
    nlohmann::ordered_json j;
    j["scene"] = r.scene;
    j["flare"] = r.flare;
    j["composite"] = r.composite;
    j["scene_gt"] = r.scene_gt;
    j["flare_gt"] = r.flare_gt;
    j["mode"] = std::string(to_string(r.mode));
    j["p"] = r.p;
    j["q"] = r.q;
    j["sigma2"] = r.sigma2;
    j["gamma"] = r.gamma;
    j["seed"] = r.seed;
    j["pair_index"] = r.pair_index;
    return j.dump();
}

PairRecord parse_json_line(const std::string& line) {
    try {
        const json j = json::parse(line);
        PairRecord r;
        r.scene = j.at("scene").get<std::string>();
        r.flare = j.at("flare").get<std::string>();
        r.composite = j.at("composite").get<std::string>();
        r.scene_gt = j.at("scene_gt").get<std::string>();
        r.flare_gt = j.at("flare_gt").get<std::string>();
        r.mode = parse_blend_mode(j.at("mode").get<std::string>());
        r.p = j.at("p").get<double>();
        r.q = j.at("q").get<double>();
        r.sigma2 = j.at("sigma2").get<double>();
        r.gamma = j.at("gamma").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.pair_index = j.at("pair_index").get<std::uint64_t>();
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad manifest line: ") + e.what());
    } catch (const ParameterError& e) {
        throw FormatError(std::string("bad manifest line: ") + e.what());
    }
}

std::vector<PairRecord> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::vector<PairRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) records.push_back(parse_json_line(line));
    }
    return records;
}

std::vector<fs::path> list_images(const fs::path& dir) {
    return list_with_extensions(dir, {".png"});
}

std::pair<std::size_t, std::size_t> select_pair(std::uint64_t seed, std::size_t num_scenes,
                                                std::size_t num_flares) {
    Rng rng(stream_seed(seed, Stream::Selection));
    const auto scene = static_cast<std::size_t>(rng.uniform_index(num_scenes));
    const auto flare = static_cast<std::size_t>(rng.uniform_index(num_flares));
    return {scene, flare};
}

fs::path run_synthesis(const SynthJob& job) {
    job.policy.validate();
    const auto scenes = list_images(job.scenes_dir);
    const auto flares = list_images(job.flares_dir);
    if (scenes.empty()) {
        throw ParameterError("no PNG scenes in '" + job.scenes_dir.string() + "'");
    }
    if (flares.empty()) {
        throw ParameterError("no PNG flares in '" + job.flares_dir.string() + "'");
    }

    const fs::path composite_dir = job.out_dir / "composite";
    const fs::path scene_gt_dir = job.out_dir / "scene_gt";
    const fs::path flare_gt_dir = job.out_dir / "flare_gt";
    for (const auto& d : {job.out_dir, composite_dir, scene_gt_dir, flare_gt_dir}) {
        ensure_directory(d);
    }

    std::vector<PairRecord> records(job.count);
    auto make_pair = [&](std::uint64_t index) {
        const SynthesisParams params = sample_params(job.master_seed, index, job.policy);
        const auto [si, fi] = select_pair(params.seed, scenes.size(), flares.size());
        const EncodedImage scene = io::read_png(scenes[si]);
        const EncodedImage flare = io::read_png(flares[fi]);

        std::optional<Placement> placement;
        if (!scene.same_shape(flare)) {
            placement = random_placement(flare.width(), flare.height(), scene.width(),
                                         scene.height(), params.seed);
        }
        const SynthesizedPair out = synthesize_pair(scene, flare, params, placement);

        const std::string name = index_name(index);
        io::write_png(composite_dir / name, out.composite);
        io::write_png(scene_gt_dir / name, out.scene_gt);
        io::write_png(flare_gt_dir / name, out.flare_gt);

        PairRecord& r = records[index];
        r.scene = scenes[si].generic_string();
        r.flare = flares[fi].generic_string();
        r.composite = (fs::path("composite") / name).generic_string();
        r.scene_gt = (fs::path("scene_gt") / name).generic_string();
        r.flare_gt = (fs::path("flare_gt") / name).generic_string();
        r.mode = params.mode;
        r.p = params.p;
        r.q = params.q;
        r.sigma2 = params.noise_variance;
        r.gamma = params.gamma;
        r.seed = params.seed;
        r.pair_index = index;
    };

    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(job.jobs == 0 ? 1 : job.jobs, 1,
                                                        std::max<std::uint64_t>(job.count, 1)));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            const std::uint64_t index = next.fetch_add(1);
            if (index >= job.count) return;
            try {
                make_pair(index);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);

    const fs::path manifest = job.out_dir / kManifestName;
    std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest '" + manifest.string() + "'");
    for (const auto& r : records) out << to_json_line(r) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + manifest.string() + "'");
    return manifest;
}

std::vector<EvalRow> evaluate_dirs(const fs::path& pred_dir, const fs::path& gt_dir,
                                   double gamma) {
    const auto preds = list_with_extensions(pred_dir, {".png", ".pfm"});
    std::vector<EvalRow> rows;
    for (const auto& pred : preds) {
        const fs::path gt = gt_dir / pred.filename();
        std::error_code ec;
        if (!fs::is_regular_file(gt, ec)) continue;
        const LinearImage a = io::read_linear(pred, gamma);
        const LinearImage b = io::read_linear(gt, gamma);
        rows.push_back({pred.filename().string(), metrics::psnr(a, b), metrics::ssim(a, b)});
    }
    return rows;
}

} // namespace flarekit::batch
