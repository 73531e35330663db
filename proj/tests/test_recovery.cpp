#include "flarekit/errors.hpp"
#include "flarekit/io.hpp"
#include "flarekit/recovery.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

using namespace flarekit;

namespace {

// Dim background at illuminance <= 0.25 with a saturated 3x3 blob.
LinearImage blob_image(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> data(static_cast<std::size_t>(n) * n * 3);
    for (auto& v : data) v = static_cast<float>(rng.uniform(0.0, 0.25));
    for (int y = 4; y < 7; ++y) {
        for (int x = 4; x < 7; ++x) {
            for (int c = 0; c < 3; ++c) data[(static_cast<std::size_t>(y) * n + x) * 3 + c] = 1.0f;
        }
    }
    return LinearImage(n, n, std::move(data));
}

} // namespace

TEST_CASE("recovery_weights endpoints and midpoint") {
    // Channel sums 0, 1.5, 3 normalize to 0, 0.5, 1.
    const auto img = testing::from_gray(3, 1, {0.0f, 0.5f, 1.0f});
    const auto w = recovery_weights(img, 15.0);
    CHECK(w[0] == 0.0f);
    CHECK(w[2] == 1.0f);
    CHECK(static_cast<double>(w[1]) == 3.0517578125e-5);
    CHECK(recovery_weights(img, 1.0)[1] == 0.5f);
}

TEST_CASE("recovery_weights errors") {
    CHECK_THROWS_AS(recovery_weights(LinearImage::filled(4, 4, 0.3f), 15.0), DegenerateInputError);
    CHECK_THROWS_AS(recovery_weights(LinearImage(), 15.0), ParameterError);
    const auto img = testing::random_image(4, 4, 1);
    CHECK_THROWS_AS(recovery_weights(img, 0.0), ParameterError);
    CHECK_THROWS_AS(recovery_weights(img, -3.0), ParameterError);
    CHECK_THROWS_AS(recovery_weights(img, INFINITY), ParameterError);
}

TEST_CASE("recover examples") {
    const auto input = blob_image(16, 5);
    SUBCASE("identity operator absorbs") {
        for (double a : {1.0, 5.0, 15.0, 25.0}) CHECK(recover(input, input, a) == input);
    }
    SUBCASE("brightest pixels equal the input") {
        const auto deflared = testing::random_image(16, 16, 6);
        const auto out = recover(input, deflared, 15.0);
        for (int y = 4; y < 7; ++y) {
            for (int x = 4; x < 7; ++x) {
                for (int c = 0; c < 3; ++c) CHECK(out.at(x, y, c) == input.at(x, y, c));
            }
        }
    }
    SUBCASE("black deflared image keeps only the blob") {
        const auto out = recover(input, LinearImage(16, 16), 15.0);
        // Background normalized illuminance <= 0.25 < 0.5, so every background
        // weight is below 0.5^15; blob pixels have weight 1.
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                const bool blob = x >= 4 && x < 7 && y >= 4 && y < 7;
                for (int c = 0; c < 3; ++c) {
                    if (blob) {
                        CHECK(out.at(x, y, c) == input.at(x, y, c));
                    } else {
                        CHECK(out.at(x, y, c) <= 3.052e-5f);
                    }
                }
            }
        }
    }
    CHECK_THROWS_AS(recover(input, LinearImage(15, 16), 15.0), ShapeError);
}

TEST_CASE("constant input falls back to the deflared image with a warning") {
    const auto input = LinearImage::filled(8, 8, 0.4f);
    const auto deflared = testing::random_image(8, 8, 9);
    std::string warning;
    const auto out = recover(input, deflared, 15.0, [&](std::string_view m) { warning = m; });
    CHECK(out == deflared);
    CHECK(warning.find("constant") != std::string::npos);
}

TEST_CASE("recovery properties on random images") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto input = testing::random_image(12, 12, 300 + seed);
        const auto deflared = testing::random_image(12, 12, 400 + seed);

        const auto w5 = recovery_weights(input, 5.0);
        const auto w15 = recovery_weights(input, 15.0);
        for (std::size_t i = 0; i < w5.size(); ++i) CHECK(w15[i] <= w5[i]);

        const auto out = recover(input, deflared, 15.0);
        for (std::size_t i = 0; i < out.data().size(); ++i) {
            const float a = input.data()[i], b = deflared.data()[i];
            CHECK(out.data()[i] >= std::min(a, b));
            CHECK(out.data()[i] <= std::max(a, b));
        }
    }
}

TEST_CASE("weights respond continuously to a small perturbation") {
    auto base = testing::random_image(10, 10, 12, 0.1f, 0.9f);
    // Pin a unique maximum and minimum away from the perturbed pixel.
    std::vector<float> data(base.data().begin(), base.data().end());
    for (int c = 0; c < 3; ++c) {
        data[c] = 1.0f;
        data[3 + c] = 0.0f;
    }
    const LinearImage img(10, 10, data);
    const std::size_t k = 55;
    data[3 * k] = data[3 * k] + 1e-6f;
    const LinearImage bumped(10, 10, data);

    const auto w0 = recovery_weights(img, 2.0);
    const auto w1 = recovery_weights(bumped, 2.0);
    for (std::size_t i = 0; i < w0.size(); ++i) {
        CHECK(std::abs(w1[i] - w0[i]) <= (i == k ? 1e-5f : 0.0f));
    }
}

TEST_CASE("alpha sweep") {
    const auto input = blob_image(24, 31);
    const auto deflared = GaussianBlur(3).apply(UniformDarken(0.6).apply(input));
    const std::vector<double> alphas{15.0, 20.0, 25.0};
    const auto sweep = alpha_sweep(input, deflared, alphas);
    REQUIRE(sweep.outputs.size() == 3);
    REQUIRE(sweep.linf_steps.size() == 2);
    CHECK(sweep.linf_steps[1] <= sweep.linf_steps[0]);

    const std::vector<double> one{15.0};
    const auto single = alpha_sweep(input, deflared, one);
    CHECK(single.outputs.size() == 1);
    CHECK(single.linf_steps.empty());

    CHECK_THROWS_AS(alpha_sweep(input, deflared, std::vector<double>{}), ParameterError);
}

TEST_CASE("small alpha blends the flare back in") {
    const auto dir = testing::scratch_dir("recovery_external");
    // Flare-heavy input: bright halo around a saturated core.
    const int n = 32;
    std::vector<float> data(static_cast<std::size_t>(n) * n * 3);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double r = std::hypot(x - 16.0, y - 16.0);
            const double v = std::clamp(1.2 * std::exp(-r * r / 60.0), 0.0, 1.0);
            for (int c = 0; c < 3; ++c) data[(static_cast<std::size_t>(y) * n + x) * 3 + c] = static_cast<float>(v);
        }
    }
    const LinearImage input(n, n, data);
    const auto flare_free = LinearImage::filled(n, n, 0.05f);
    io::write_pfm(dir / "deflared.pfm", flare_free);

    const ExternalDeflare op(dir / "deflared.pfm");
    const auto deflared = op.apply(input);
    CHECK(deflared == flare_free);
    const double d1 = l1_distance(recover(input, deflared, 1.0), deflared);
    const double d15 = l1_distance(recover(input, deflared, 15.0), deflared);
    CHECK(d1 > d15);

    CHECK_THROWS_AS(op.apply(LinearImage(4, 4)), ShapeError);
}

TEST_CASE("built-in operators preserve size and range") {
    const auto img = testing::random_image(9, 7, 2);
    std::vector<std::unique_ptr<DeflareOperator>> ops;
    ops.push_back(std::make_unique<IdentityDeflare>());
    ops.push_back(std::make_unique<UniformDarken>(0.3));
    ops.push_back(std::make_unique<GaussianBlur>(2));
    for (const auto& op : ops) CHECK(op->apply(img).same_shape(img));
    CHECK(UniformDarken(0.5).apply(LinearImage::filled(2, 2, 0.8f)).at(1, 1, 1) ==
          doctest::Approx(0.4f));
    CHECK(GaussianBlur(3).apply(LinearImage::filled(5, 5, 0.7f)).at(2, 2, 0) ==
          doctest::Approx(0.7f).epsilon(1e-6));
    CHECK_THROWS_AS(UniformDarken(1.5), ParameterError);
    CHECK_THROWS_AS(GaussianBlur(-1), ParameterError);
}
