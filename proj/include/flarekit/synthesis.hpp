#pragma once

#include "flarekit/color.hpp"
#include "flarekit/image.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace flarekit {

enum class BlendMode { Convex, DirectAdd };

std::string_view to_string(BlendMode mode) noexcept;
/// Accepts "convex", "direct" and "direct-add"; throws ParameterError otherwise.
BlendMode parse_blend_mode(std::string_view text);

/// Distribution of randomized synthesis parameters.
struct SamplingPolicy {
    BlendMode mode = BlendMode::Convex;
    double p_min = 4.0;
    double p_max = 7.0;
    double q = 0.5;
    double noise_scale = 0.01; // sigma^2 = noise_scale * chi2(chi_dof)
    int chi_dof = 1;
    double gamma = kDefaultGamma;
    int output_depth = 16;

    /// Throws ParameterError on an unusable policy.
    void validate() const;
};

struct SynthesisParams {
    BlendMode mode = BlendMode::Convex;
    double p = 5.5;              // sigmoid steepness
    double q = 0.5;              // sigmoid midpoint
    double noise_variance = 0.0; // sigma^2, >= 0
    double gamma = kDefaultGamma;
    int output_depth = 16;
    std::uint64_t master_seed = 0;
    std::uint64_t pair_index = 0;
    std::uint64_t seed = 0;      // per-pair seed, pair_seed(master_seed, pair_index)

    std::uint64_t noise_seed() const noexcept;
};

/// Draws p ~ U[p_min, p_max] and sigma^2 ~ noise_scale * chi2(dof) from the
/// parameter sub-stream of pair_seed(master_seed, pair_index).
SynthesisParams sample_params(std::uint64_t master_seed, std::uint64_t pair_index,
                              const SamplingPolicy& policy = {});

/// Increasing sigmoid 1 / (1 + exp(-p (x - q))).
double weight_sigmoid(double x, double p, double q) noexcept;

/// Elementwise weight_sigmoid over an illuminance map. Throws ParameterError
/// unless p > 0 and q in (0,1).
WeightMap weight_map(const IlluminanceMap& illum, double p, double q);

/// out = clip((1 - w) s + w f + n), n ~ N(0, noise_variance) i.i.d. per sample.
/// Throws ShapeError when the three inputs disagree on dimensions.
LinearImage blend_convex(const LinearImage& scene, const LinearImage& flare, const WeightMap& w,
                         double noise_variance, std::uint64_t noise_seed);

/// out = clip(s + f + n).
LinearImage blend_direct_add(const LinearImage& scene, const LinearImage& flare,
                             double noise_variance, std::uint64_t noise_seed);

/// Geometric placement of a flare onto a scene-sized canvas. The flare is
/// scaled about its top-left corner, rotated about its own centre, then its
/// top-left corner is moved to (offset_x, offset_y).
struct Placement {
    int offset_x = 0;
    int offset_y = 0;
    double scale = 1.0;
    double rotation_deg = 0.0;
};

/// Bilinear resample of `flare` onto a black canvas. Samples inside the
/// transformed flare footprint clamp to the flare's edge; everything outside
/// is zero. Throws ParameterError for scale <= 0 or a negative canvas.
LinearImage place_flare(const LinearImage& flare, int canvas_w, int canvas_h,
                        const Placement& placement);

/// Placement that scales the flare to cover the canvas, centres it, and
/// applies a seeded random rotation.
Placement random_placement(int flare_w, int flare_h, int canvas_w, int canvas_h,
                           std::uint64_t seed);

/// Linear-space composite of already decoded layers. Flare and scene must
/// share dimensions.
LinearImage composite_linear(const LinearImage& scene, const LinearImage& flare,
                             const SynthesisParams& params);

struct SynthesizedPair {
    EncodedImage composite;
    EncodedImage scene_gt;
    EncodedImage flare_gt;
};

/// decode -> (place) -> illuminance -> weight -> blend -> encode. Without a
/// placement the flare must match the scene's dimensions (ShapeError otherwise).
SynthesizedPair synthesize_pair(const EncodedImage& scene, const EncodedImage& flare,
                                const SynthesisParams& params,
                                const std::optional<Placement>& placement = std::nullopt);

} // namespace flarekit
