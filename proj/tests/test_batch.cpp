#include "flarekit/batch.hpp"
#include "flarekit/errors.hpp"
#include "flarekit/io.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <random>

using namespace flarekit;
namespace fs = std::filesystem;

namespace {

// Reference sampler written from the documented derivation only:
// SplitMix64 mixing, per-pair seed, selection sub-stream (id 3), mt19937_64,
// rejection sampling for unbiased indices.
namespace reference {

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t pair(std::uint64_t master, std::uint64_t index) {
    return mix(mix(master) ^ mix(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t index_below(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t max = ~std::uint64_t{0};
    const std::uint64_t limit = max - max % n;
    for (;;) {
        const std::uint64_t x = eng();
        if (x < limit) return x % n;
    }
}

std::pair<std::size_t, std::size_t> select(std::uint64_t master, std::uint64_t index,
                                           std::size_t scenes, std::size_t flares) {
    const std::uint64_t seed = pair(master, index);
    std::mt19937_64 eng(mix(seed ^ mix(3 * 0xd1b54a32d192ed03ULL)));
    const auto s = index_below(eng, scenes);
    const auto f = index_below(eng, flares);
    return {s, f};
}

} // namespace reference

void write_corpus(const fs::path& dir, int count, int w, int h, std::uint64_t seed) {
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        const auto img = gamma_encode(testing::random_image(w, h, seed + i), 2.2, 8);
        io::write_png(dir / ("img" + std::to_string(i) + ".png"), img);
    }
}

} // namespace

TEST_CASE("pair selection matches an independent reference sampler") {
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto [s, f] = batch::select_pair(pair_seed(7, i), 10, 10);
        const auto [rs, rf] = reference::select(7, i, 10, 10);
        CHECK(s == rs);
        CHECK(f == rf);
    }
}

TEST_CASE("manifest lines carry the fixed field set in order") {
    batch::PairRecord r{"s.png", "f.png", "composite/000001.png", "scene_gt/000001.png",
                        "flare_gt/000001.png", BlendMode::DirectAdd, 4.25, 0.5, 0.0123, 2.2,
                        18446744073709551615ULL, 1};
    const std::string line = batch::to_json_line(r);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(batch::parse_json_line(line) == r);

    const auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (const auto& item : j.items()) keys.push_back(item.key());
    CHECK(keys == std::vector<std::string>{"scene", "flare", "composite", "scene_gt", "flare_gt",
                                           "mode", "p", "q", "sigma2", "gamma", "seed",
                                           "pair_index"});
    CHECK(j["mode"] == "direct-add");

    CHECK_THROWS_AS(batch::parse_json_line("{\"scene\": 1}"), FormatError);
    CHECK_THROWS_AS(batch::parse_json_line("not json"), FormatError);
}

TEST_CASE("run_synthesis is deterministic and independent of worker count") {
    const auto root = testing::scratch_dir("batch_synth");
    write_corpus(root / "scenes", 4, 24, 16, 100);
    write_corpus(root / "flares", 3, 24, 16, 200);
    // One flare of a different size exercises the placement path.
    write_corpus(root / "flares_mixed", 1, 12, 12, 300);
    fs::copy(root / "flares" / "img0.png", root / "flares_mixed" / "img9.png");

    batch::SynthJob job;
    job.scenes_dir = root / "scenes";
    job.flares_dir = root / "flares_mixed";
    job.count = 12;
    job.master_seed = 7;

    job.out_dir = root / "serial";
    job.jobs = 1;
    const auto serial = batch::run_synthesis(job);
    job.out_dir = root / "parallel";
    job.jobs = 4;
    const auto parallel = batch::run_synthesis(job);

    CHECK(testing::slurp(serial) == testing::slurp(parallel));
    const auto records = batch::read_manifest(serial);
    REQUIRE(records.size() == 12);
    for (std::uint64_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        CHECK(r.pair_index == i);
        CHECK(r.seed == pair_seed(7, i));
        CHECK(r.p >= 4.0);
        CHECK(r.p <= 7.0);
        for (const auto& rel : {r.composite, r.scene_gt, r.flare_gt}) {
            CHECK(testing::slurp(root / "serial" / rel) == testing::slurp(root / "parallel" / rel));
            const auto img = io::read_png(root / "serial" / rel);
            CHECK(img.bit_depth() == 16);
            CHECK(img.width() == 24);
        }
    }
}

TEST_CASE("run_synthesis edge cases") {
    const auto root = testing::scratch_dir("batch_edges");
    write_corpus(root / "scenes", 1, 8, 8, 1);
    fs::create_directories(root / "empty");

    batch::SynthJob job;
    job.scenes_dir = root / "scenes";
    job.flares_dir = root / "scenes";
    job.out_dir = root / "out0";
    job.count = 0;
    const auto manifest = batch::run_synthesis(job);
    CHECK(fs::exists(manifest));
    CHECK(fs::file_size(manifest) == 0);

    job.flares_dir = root / "empty";
    job.count = 1;
    CHECK_THROWS_AS(batch::run_synthesis(job), ParameterError);

    job.flares_dir = root / "scenes";
    job.out_dir = root / "scenes" / "img0.png" / "sub";
    CHECK_THROWS_AS(batch::run_synthesis(job), IoError);
}

TEST_CASE("evaluate_dirs scores identical directories as perfect") {
    const auto root = testing::scratch_dir("batch_eval");
    write_corpus(root / "gt", 3, 16, 16, 40);
    fs::copy(root / "gt", root / "pred");
    const auto rows = batch::evaluate_dirs(root / "pred", root / "gt", 2.2);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.psnr == 99.0);
        CHECK(r.ssim == 1.0);
    }
}
