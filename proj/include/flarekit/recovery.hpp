#pragma once

#include "flarekit/color.hpp"
#include "flarekit/image.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace flarekit {

inline constexpr double kDefaultRecoveryAlpha = 15.0;

struct RecoveryParams {
    double alpha = kDefaultRecoveryAlpha;
};

using WarningSink = std::function<void(std::string_view)>;

/// Min-max normalized per-pixel channel sum raised to `alpha`. Pixels at the
/// global maximum get weight exactly 1, pixels at the global minimum exactly 0.
/// Throws ParameterError for alpha <= 0 or an empty image, and
/// DegenerateInputError when every pixel has the same channel sum.
WeightMap recovery_weights(const LinearImage& input, double alpha);

/// (1 - w) deflared + w input with w = recovery_weights(input, alpha).
/// A constant-illuminance input has no identifiable light source: the weights
/// fall back to zero (output == deflared) and `warn` is told why.
/// Throws ShapeError when the images differ in size.
LinearImage recover(const LinearImage& input, const LinearImage& deflared, double alpha,
                    const WarningSink& warn = {});

/// Blend with precomputed weights.
LinearImage recover_with_weights(const LinearImage& input, const LinearImage& deflared,
                                 const WeightMap& weights);

struct AlphaSweep {
    std::vector<double> alphas;
    std::vector<LinearImage> outputs;
    /// linf_steps[i] = max |outputs[i+1] - outputs[i]|.
    std::vector<double> linf_steps;
};

/// Throws ParameterError on an empty alpha list.
AlphaSweep alpha_sweep(const LinearImage& input, const LinearImage& deflared,
                       std::span<const double> alphas, const WarningSink& warn = {});

double linf_distance(const LinearImage& a, const LinearImage& b);
double l1_distance(const LinearImage& a, const LinearImage& b);

/// Stand-in for a flare-removal network: any size-preserving transform of a
/// linear image into [0,1].
class DeflareOperator {
public:
    virtual ~DeflareOperator() = default;
    virtual LinearImage apply(const LinearImage& input) const = 0;
};

class IdentityDeflare final : public DeflareOperator {
public:
    LinearImage apply(const LinearImage& input) const override { return input; }
};

/// Multiplies every sample by `factor` in [0,1].
class UniformDarken final : public DeflareOperator {
public:
    explicit UniformDarken(double factor);
    LinearImage apply(const LinearImage& input) const override;

private:
    double factor_;
};

/// Separable Gaussian with sigma = radius / 2 and a kernel of 2*radius+1 taps,
/// edges clamped.
class GaussianBlur final : public DeflareOperator {
public:
    explicit GaussianBlur(int radius);
    LinearImage apply(const LinearImage& input) const override;

private:
    int radius_;
    std::vector<double> kernel_;
};

/// Reads a precomputed deflared image (PNG gamma-decoded, or PFM) and
/// checks that it matches the input's dimensions.
class ExternalDeflare final : public DeflareOperator {
public:
    ExternalDeflare(std::filesystem::path path, double gamma = kDefaultGamma);
    LinearImage apply(const LinearImage& input) const override;

private:
    std::filesystem::path path_;
    double gamma_;
};

} // namespace flarekit
