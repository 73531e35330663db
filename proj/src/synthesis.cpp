#include "flarekit/synthesis.hpp"

#include "flarekit/errors.hpp"
#include "flarekit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace flarekit {

namespace {

void check_noise_variance(double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw ParameterError("noise variance must be finite and >= 0, got " +
                             std::to_string(variance));
    }
}

void check_same_shape(const LinearImage& a, const LinearImage& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()));
    }
}

// Applies out[i] = clip(value(i) + n_i) with n_i drawn in sample order.
template <class ValueFn>
LinearImage finish_with_noise(int width, int height, std::size_t n, ValueFn value,
                              double noise_variance, std::uint64_t noise_seed) {
    std::vector<float> out(n);
    if (noise_variance == 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = static_cast<float>(std::clamp(value(i), 0.0, 1.0));
        }
    } else {
        Rng rng(noise_seed);
        const double sigma = std::sqrt(noise_variance);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = static_cast<float>(std::clamp(value(i) + sigma * rng.normal(), 0.0, 1.0));
        }
    }
    return LinearImage(width, height, std::move(out));
}

float sample_clamped(const LinearImage& img, double fx, double fy, int c) {
    const double x = std::clamp(fx, 0.0, static_cast<double>(img.width() - 1));
    const double y = std::clamp(fy, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double tx = x - x0;
    const double ty = y - y0;
    const double top = (1.0 - tx) * img.at(x0, y0, c) + tx * img.at(x1, y0, c);
    const double bottom = (1.0 - tx) * img.at(x0, y1, c) + tx * img.at(x1, y1, c);
    return static_cast<float>(std::clamp((1.0 - ty) * top + ty * bottom, 0.0, 1.0));
}

} // namespace

std::string_view to_string(BlendMode mode) noexcept {
    return mode == BlendMode::Convex ? "convex" : "direct-add";
}

BlendMode parse_blend_mode(std::string_view text) {
    if (text == "convex") return BlendMode::Convex;
    if (text == "direct" || text == "direct-add") return BlendMode::DirectAdd;
    throw ParameterError("unknown blend mode '" + std::string(text) + "'");
}

void SamplingPolicy::validate() const {
    if (!(p_min > 0.0) || !(p_max >= p_min) || !std::isfinite(p_max)) {
        throw ParameterError("sigmoid steepness range must satisfy 0 < p_min <= p_max");
    }
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("sigmoid midpoint q must lie in (0,1)");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
        throw ParameterError("noise scale must be finite and >= 0");
    }
    if (chi_dof < 1) throw ParameterError("chi-square degrees of freedom must be >= 1");
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    if (output_depth != 8 && output_depth != 16) {
        throw ParameterError("output depth must be 8 or 16");
    }
}

std::uint64_t SynthesisParams::noise_seed() const noexcept {
    return stream_seed(seed, Stream::Noise);
}

SynthesisParams sample_params(std::uint64_t master_seed, std::uint64_t pair_index,
                              const SamplingPolicy& policy) {
    policy.validate();
    SynthesisParams params;
    params.mode = policy.mode;
    params.q = policy.q;
    params.gamma = policy.gamma;
    params.output_depth = policy.output_depth;
    params.master_seed = master_seed;
    params.pair_index = pair_index;
    params.seed = pair_seed(master_seed, pair_index);

    Rng rng(stream_seed(params.seed, Stream::Params));
    params.p = rng.uniform(policy.p_min, policy.p_max);
    params.noise_variance = policy.noise_scale * rng.chi_square(policy.chi_dof);
    return params;
}

double weight_sigmoid(double x, double p, double q) noexcept {
    return 1.0 / (1.0 + std::exp(-p * (x - q)));
}

WeightMap weight_map(const IlluminanceMap& illum, double p, double q) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw ParameterError("sigmoid steepness p must be positive, got " + std::to_string(p));
    }
    if (!(q > 0.0 && q < 1.0)) {
        throw ParameterError("sigmoid midpoint q must lie in (0,1), got " + std::to_string(q));
    }
    const auto values = illum.values();
    std::vector<float> w(values.size());
    std::transform(values.begin(), values.end(), w.begin(),
                   [&](float x) { return static_cast<float>(weight_sigmoid(x, p, q)); });
    return WeightMap(illum.width(), illum.height(), std::move(w));
}

LinearImage blend_convex(const LinearImage& scene, const LinearImage& flare, const WeightMap& w,
                         double noise_variance, std::uint64_t noise_seed) {
    check_same_shape(scene, flare, "scene/flare dimension mismatch");
    if (!w.matches(scene)) throw ShapeError("weight map does not match image dimensions");
    check_noise_variance(noise_variance);

    const auto s = scene.data();
    const auto f = flare.data();
    const auto weights = w.values();
    return finish_with_noise(
        scene.width(), scene.height(), s.size(),
        [&](std::size_t i) {
            const double wi = weights[i / LinearImage::kChannels];
            return (1.0 - wi) * s[i] + wi * f[i];
        },
        noise_variance, noise_seed);
}

LinearImage blend_direct_add(const LinearImage& scene, const LinearImage& flare,
                             double noise_variance, std::uint64_t noise_seed) {
    check_same_shape(scene, flare, "scene/flare dimension mismatch");
    check_noise_variance(noise_variance);

    const auto s = scene.data();
    const auto f = flare.data();
    return finish_with_noise(
        scene.width(), scene.height(), s.size(),
        [&](std::size_t i) { return static_cast<double>(s[i]) + f[i]; }, noise_variance,
        noise_seed);
}

LinearImage place_flare(const LinearImage& flare, int canvas_w, int canvas_h,
                        const Placement& placement) {
    if (!(placement.scale > 0.0) || !std::isfinite(placement.scale)) {
        throw ParameterError("placement scale must be positive");
    }
    if (canvas_w < 0 || canvas_h < 0) throw ParameterError("negative canvas size");
    if (flare.empty()) return LinearImage(canvas_w, canvas_h);

    const double scale = placement.scale;
    const double theta = placement.rotation_deg * std::numbers::pi / 180.0;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double fw = flare.width();
    const double fh = flare.height();
    const double cx = 0.5 * scale * fw;
    const double cy = 0.5 * scale * fh;

    std::vector<float> out(static_cast<std::size_t>(canvas_w) * canvas_h * 3, 0.0f);
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            const double dx = x + 0.5 - placement.offset_x - cx;
            const double dy = y + 0.5 - placement.offset_y - cy;
            // Inverse rotation back into the scaled flare frame.
            const double u = (cos_t * dx + sin_t * dy + cx) / scale;
            const double v = (-sin_t * dx + cos_t * dy + cy) / scale;
            if (u < 0.0 || v < 0.0 || u > fw || v > fh) continue;
            float* px = &out[(static_cast<std::size_t>(y) * canvas_w + x) * 3];
            for (int c = 0; c < 3; ++c) px[c] = sample_clamped(flare, u - 0.5, v - 0.5, c);
        }
    }
    return LinearImage(canvas_w, canvas_h, std::move(out));
}

Placement random_placement(int flare_w, int flare_h, int canvas_w, int canvas_h,
                           std::uint64_t seed) {
    if (flare_w <= 0 || flare_h <= 0) throw ParameterError("empty flare");
    Placement placement;
    placement.scale = std::max(static_cast<double>(canvas_w) / flare_w,
                               static_cast<double>(canvas_h) / flare_h);
    placement.offset_x =
        static_cast<int>(std::lround((canvas_w - placement.scale * flare_w) / 2.0));
    placement.offset_y =
        static_cast<int>(std::lround((canvas_h - placement.scale * flare_h) / 2.0));
    Rng rng(stream_seed(seed, Stream::Placement));
    placement.rotation_deg = rng.uniform(0.0, 360.0);
    return placement;
}

LinearImage composite_linear(const LinearImage& scene, const LinearImage& flare,
                             const SynthesisParams& params) {
    switch (params.mode) {
    case BlendMode::Convex: {
        check_same_shape(scene, flare, "scene/flare dimension mismatch");
        const auto w = weight_map(illuminance(flare), params.p, params.q);
        return blend_convex(scene, flare, w, params.noise_variance, params.noise_seed());
    }
    case BlendMode::DirectAdd:
        return blend_direct_add(scene, flare, params.noise_variance, params.noise_seed());
    }
    throw ParameterError("unknown blend mode");
}

SynthesizedPair synthesize_pair(const EncodedImage& scene, const EncodedImage& flare,
                                const SynthesisParams& params,
                                const std::optional<Placement>& placement) {
    const LinearImage scene_lin = gamma_decode(scene, params.gamma);
    LinearImage flare_lin = gamma_decode(flare, params.gamma);
    if (placement) {
        flare_lin = place_flare(flare_lin, scene.width(), scene.height(), *placement);
    } else if (!scene.same_shape(flare)) {
        throw ShapeError("flare " + std::to_string(flare.width()) + "x" +
                         std::to_string(flare.height()) + " does not match scene " +
                         std::to_string(scene.width()) + "x" + std::to_string(scene.height()) +
                         " and no placement was given");
    }

    const LinearImage composite = composite_linear(scene_lin, flare_lin, params);
    return SynthesizedPair{
        gamma_encode(composite, params.gamma, params.output_depth),
        gamma_encode(scene_lin, params.gamma, params.output_depth),
        gamma_encode(flare_lin, params.gamma, params.output_depth),
    };
}

} // namespace flarekit
