#include "flarekit/errors.hpp"
#include "flarekit/synthesis.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace flarekit;

namespace {

int max_step_diff(const EncodedImage& a, const EncodedImage& b) {
    int m = 0;
    for (std::size_t i = 0; i < a.samples().size(); ++i) {
        m = std::max(m, std::abs(int(a.samples()[i]) - int(b.samples()[i])));
    }
    return m;
}

} // namespace

TEST_CASE("sample_params is deterministic and honours the policy") {
    const auto a = sample_params(7, 3);
    const auto b = sample_params(7, 3);
    CHECK(a.p == b.p);
    CHECK(a.noise_variance == b.noise_variance);
    CHECK(a.seed == b.seed);
    CHECK(a.seed == pair_seed(7, 3));
    CHECK(a.q == 0.5);
    CHECK(sample_params(7, 4).seed != a.seed);
    CHECK(sample_params(8, 3).seed != a.seed);
}

TEST_CASE("sample_params Monte-Carlo moments") {
    // Oracle: U[4,7] has mean 5.5; 0.01 * chi2(1) has mean 0.01.
    constexpr int n = 10000;
    double p_min = 1e9, p_max = -1e9, p_sum = 0.0, s_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto params = sample_params(2024, static_cast<std::uint64_t>(i));
        p_min = std::min(p_min, params.p);
        p_max = std::max(p_max, params.p);
        p_sum += params.p;
        s_sum += params.noise_variance;
        CHECK(params.noise_variance >= 0.0);
    }
    CHECK(p_min >= 4.0);
    CHECK(p_max <= 7.0);
    CHECK(std::abs(p_sum / n - 5.5) <= 0.05);
    CHECK(std::abs(s_sum / n - 0.01) <= 0.001);
}

TEST_CASE("sampling policy validation") {
    SamplingPolicy bad;
    bad.q = 1.0;
    CHECK_THROWS_AS(sample_params(0, 0, bad), ParameterError);
    bad = {};
    bad.p_min = 8.0;
    CHECK_THROWS_AS(sample_params(0, 0, bad), ParameterError);
    bad = {};
    bad.chi_dof = 0;
    CHECK_THROWS_AS(sample_params(0, 0, bad), ParameterError);
}

TEST_CASE("weight_sigmoid examples") {
    for (double p : {0.5, 4.0, 5.5, 7.0}) CHECK(weight_sigmoid(0.5, p, 0.5) == 0.5);
    CHECK(weight_sigmoid(1.0, 4.0, 0.5) == doctest::Approx(0.880797077977882444).epsilon(1e-14));
    CHECK(weight_sigmoid(0.0, 4.0, 0.5) == doctest::Approx(0.119202922022117556).epsilon(1e-14));
}

TEST_CASE("weight_map is increasing and strictly inside (0,1)") {
    std::vector<float> illum;
    for (int i = 0; i <= 100; ++i) illum.push_back(static_cast<float>(i / 100.0));
    const IlluminanceMap map(101, 1, illum);
    for (double p : {4.0, 7.0}) {
        const auto w = weight_map(map, p, 0.5);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(w[i] > 0.0f);
            CHECK(w[i] < 1.0f);
            if (i) CHECK(w[i] > w[i - 1]);
        }
    }
    CHECK_THROWS_AS(weight_map(map, 0.0, 0.5), ParameterError);
    CHECK_THROWS_AS(weight_map(map, 4.0, 0.0), ParameterError);
    CHECK_THROWS_AS(weight_map(map, 4.0, 1.0), ParameterError);
}

TEST_CASE("blend_convex examples") {
    const auto scene = LinearImage::filled(2, 2, 0.2f);
    const auto flare = LinearImage::filled(2, 2, 0.9f);
    SUBCASE("scalar evaluation") {
        const auto out = blend_convex(scene, flare, WeightMap::filled(2, 2, 0.8320f), 0.0, 1);
        // 0.168 * 0.2 + 0.832 * 0.9
        CHECK(out.at(1, 1, 2) == doctest::Approx(0.78240).epsilon(1e-6));
    }
    SUBCASE("weight from illuminance 0.9 at p=4") {
        const auto w = weight_map(illuminance(flare), 4.0, 0.5);
        CHECK(w[0] == doctest::Approx(0.832018385133924482).epsilon(1e-6));
    }
    SUBCASE("degenerate weights") {
        const auto rs = testing::random_image(8, 8, 1);
        const auto rf = testing::random_image(8, 8, 2);
        CHECK(blend_convex(rs, rf, WeightMap::filled(8, 8, 0.0f), 0.0, 1) == rs);
        CHECK(blend_convex(rs, rf, WeightMap::filled(8, 8, 1.0f), 0.0, 1) == rf);
    }
    CHECK_THROWS_AS(blend_convex(scene, LinearImage::filled(3, 2, 0.f), WeightMap::filled(2, 2, 0.f), 0.0, 1),
                    ShapeError);
    CHECK_THROWS_AS(blend_convex(scene, flare, WeightMap::filled(1, 2, 0.f), 0.0, 1), ShapeError);
    CHECK_THROWS_AS(blend_convex(scene, flare, WeightMap::filled(2, 2, 0.f), -1.0, 1),
                    ParameterError);
}

TEST_CASE("blend_direct_add examples") {
    CHECK(blend_direct_add(LinearImage::filled(1, 1, 0.5f), LinearImage::filled(1, 1, 0.7f), 0.0, 0)
              .at(0, 0, 0) == 1.0f);
    CHECK(blend_direct_add(LinearImage::filled(1, 1, 0.3f), LinearImage::filled(1, 1, 0.4f), 0.0, 0)
              .at(0, 0, 0) == doctest::Approx(0.7f).epsilon(1e-7));
    const auto rs = testing::random_image(8, 8, 3);
    CHECK(blend_direct_add(rs, LinearImage(8, 8), 0.0, 0) == rs);
    CHECK_THROWS_AS(blend_direct_add(rs, LinearImage(8, 7), 0.0, 0), ShapeError);
}

TEST_CASE("convexity bound and dominance over direct-add") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = testing::random_image(16, 16, 100 + seed);
        const auto f = testing::random_image(16, 16, 200 + seed);
        const auto w = weight_map(illuminance(f), 4.0 + 0.15 * seed, 0.5);
        const auto convex = blend_convex(s, f, w, 0.0, 0);
        const auto direct = blend_direct_add(s, f, 0.0, 0);
        for (std::size_t i = 0; i < s.data().size(); ++i) {
            const float a = s.data()[i], b = f.data()[i], c = convex.data()[i];
            CHECK(c >= std::min(a, b));
            CHECK(c <= std::max(a, b));
            CHECK(c <= direct.data()[i]);
        }
    }
}

TEST_CASE("noise statistics with zero weight") {
    const int n = 256;
    const auto scene = LinearImage::filled(n, n, 0.5f);
    const double variance = 0.004;
    const auto out = blend_convex(scene, LinearImage(n, n), WeightMap::filled(n, n, 0.0f), variance, 77);
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const double v = out.data()[i];
        if (v <= 0.0 || v >= 1.0) continue;
        const double d = v - scene.data()[i];
        sum += d;
        sq += d * d;
        ++count;
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(variance / count));
    CHECK(std::abs(var - variance) <= 0.05 * variance);
    // Same seed reproduces the same noise.
    CHECK(blend_convex(scene, LinearImage(n, n), WeightMap::filled(n, n, 0.0f), variance, 77) == out);
}

TEST_CASE("place_flare examples") {
    const auto flare = testing::random_image(6, 5, 8);
    SUBCASE("identity placement") {
        const auto out = place_flare(flare, 6, 5, {});
        for (std::size_t i = 0; i < out.data().size(); ++i) {
            CHECK(std::abs(out.data()[i] - flare.data()[i]) <= 1e-6f);
        }
    }
    SUBCASE("offset beyond the canvas") {
        CHECK(place_flare(flare, 6, 5, {.offset_x = 10, .offset_y = 0}) == LinearImage(6, 5));
        CHECK(place_flare(flare, 6, 5, {.offset_x = 0, .offset_y = -5}) == LinearImage(6, 5));
    }
    SUBCASE("2x2 white scaled by 2") {
        const auto out = place_flare(LinearImage::filled(2, 2, 1.0f), 4, 4, {.scale = 2.0});
        CHECK(out == LinearImage::filled(4, 4, 1.0f));
    }
    SUBCASE("offset shifts content") {
        const auto out = place_flare(LinearImage::filled(2, 2, 1.0f), 4, 4, {.offset_x = 2, .offset_y = 1});
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                const bool inside = x >= 2 && y >= 1 && y <= 2;
                CHECK(out.at(x, y, 0) == (inside ? 1.0f : 0.0f));
            }
        }
    }
    SUBCASE("half-turn rotation of a symmetric footprint flips content") {
        const LinearImage ramp(2, 1, {0.0f, 0.0f, 0.0f, 1.0f, 1.0f, 1.0f});
        const auto out = place_flare(ramp, 2, 1, {.rotation_deg = 180.0});
        CHECK(out.at(0, 0, 0) == doctest::Approx(1.0f));
        CHECK(out.at(1, 0, 0) == doctest::Approx(0.0f));
    }
    CHECK_THROWS_AS(place_flare(flare, 4, 4, {.scale = 0.0}), ParameterError);
    CHECK_THROWS_AS(place_flare(flare, 4, 4, {.scale = -1.0}), ParameterError);
}

TEST_CASE("random_placement covers the canvas and is seeded") {
    const auto a = random_placement(10, 5, 40, 40, 3);
    CHECK(a.scale == doctest::Approx(8.0));
    CHECK(a.offset_x == -20);
    CHECK(a.offset_y == 0);
    CHECK(a.rotation_deg >= 0.0);
    CHECK(a.rotation_deg < 360.0);
    CHECK(random_placement(10, 5, 40, 40, 3).rotation_deg == a.rotation_deg);
}

TEST_CASE("synthesize_pair examples") {
    const auto scene = gamma_encode(testing::random_image(12, 10, 21), 2.2, 16);
    const EncodedImage black(12, 10, 16, std::vector<std::uint16_t>(12 * 10 * 3, 0));

    SynthesisParams params;
    params.p = 4.0;
    params.q = 0.5;
    params.noise_variance = 0.0;

    SUBCASE("black flare in convex mode only attenuates by the weight floor") {
        params.mode = BlendMode::Convex;
        const auto out = synthesize_pair(scene, black, params);
        const auto s = gamma_decode(out.scene_gt, 2.2);
        const auto c = gamma_decode(out.composite, 2.2);
        const double floor_w = weight_sigmoid(0.0, 4.0, 0.5);
        CHECK(floor_w == doctest::Approx(0.119203).epsilon(1e-5));
        for (std::size_t i = 0; i < s.data().size(); ++i) {
            // One 16-bit step of slack for the re-encode.
            CHECK(std::abs(c.data()[i] - (1.0 - floor_w) * s.data()[i]) <= 1e-4);
        }
    }
    SUBCASE("direct-add with a black flare reproduces the scene bit-exactly") {
        params.mode = BlendMode::DirectAdd;
        const auto out = synthesize_pair(scene, black, params);
        CHECK(out.composite == out.scene_gt);
        CHECK(max_step_diff(out.scene_gt, scene) <= 1);
    }
    SUBCASE("deterministic with noise") {
        params.noise_variance = 0.01;
        params.seed = 1234;
        const auto flare = gamma_encode(testing::random_image(12, 10, 22), 2.2, 16);
        const auto a = synthesize_pair(scene, flare, params);
        const auto b = synthesize_pair(scene, flare, params);
        CHECK(a.composite == b.composite);
        CHECK(max_step_diff(a.flare_gt, flare) <= 1);
    }
    SUBCASE("size mismatch needs a placement") {
        const EncodedImage small(4, 4, 16, std::vector<std::uint16_t>(48, 1000));
        CHECK_THROWS_AS(synthesize_pair(scene, small, params), ShapeError);
        const auto out = synthesize_pair(scene, small, params, Placement{.scale = 3.0});
        CHECK(out.flare_gt.width() == 12);
        CHECK(out.flare_gt.height() == 10);
    }
}
