#pragma once

#include "flarekit/image.hpp"

#include <cstdint>
#include <vector>

namespace flarekit {

inline constexpr double kDefaultGamma = 2.2;

/// Maps each normalized sample v to v^gamma. Throws ParameterError for gamma <= 0.
LinearImage gamma_decode(const EncodedImage& img, double gamma = kDefaultGamma);

/// Maps each sample v to v^(1/gamma), quantized round-to-nearest at `bit_depth`.
EncodedImage gamma_encode(const LinearImage& img, double gamma = kDefaultGamma,
                          int bit_depth = 16);

/// Scalar forms of the two transforms above.
double gamma_decode_sample(std::uint32_t sample, std::uint32_t max_value, double gamma);
std::uint16_t gamma_encode_sample(double value, std::uint32_t max_value, double gamma);

/// Monotone bijection of [0,1] used as a camera tone curve.
///
/// smooth-step: T(x) = 3x^2 - 2x^3, inverted in closed form through the
/// trigonometric solution of the cubic.
///
/// logistic: a sigmoid with steepness k and midpoint m, affinely rescaled so
/// that T(0) = 0 and T(1) = 1 exactly.
class ToneMapOp {
public:
    enum class Kind { SmoothStep, Logistic };

    static ToneMapOp smooth_step() { return ToneMapOp(Kind::SmoothStep, 0.0, 0.0); }
    /// Throws ParameterError unless k > 0 and both are finite.
    static ToneMapOp logistic(double steepness, double midpoint);

    Kind kind() const noexcept { return kind_; }
    double steepness() const noexcept { return k_; }
    double midpoint() const noexcept { return m_; }

    /// Throws DomainError for x outside [0,1].
    double forward(double x) const;
    /// Throws DomainError for y outside [0,1].
    double inverse(double y) const;

private:
    ToneMapOp(Kind kind, double k, double m);

    Kind kind_;
    double k_;
    double m_;
    double lo_ = 0.0;   // sigmoid(-k m)
    double span_ = 1.0; // sigmoid(k (1 - m)) - lo_
};

/// Per-pixel (R+G+B)/3.
IlluminanceMap illuminance(const LinearImage& img);
/// Per-pixel (R+G+B) / (3 * max_value) on raw integer samples.
IlluminanceMap illuminance(const EncodedImage& img);

struct Histogram {
    int bins = 0;
    std::vector<double> edges;          // bins + 1 uniform edges over [0,1]
    std::vector<std::uint64_t> counts;  // [e_i, e_i+1), last bin closed
    std::uint64_t total = 0;
    double mean = 0.0;
    double p10 = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
};

/// Bin index of `value` among `bins` uniform bins over [0,1].
int histogram_bin(double value, int bins) noexcept;

/// Histogram and summary statistics of per-pixel illuminance.
/// Throws ParameterError for bins < 2.
Histogram histogram(const LinearImage& img, int bins);
Histogram histogram(const IlluminanceMap& illum, int bins);

/// Linear-interpolated quantile of an ascending-sorted sample, q in [0,1].
double sorted_quantile(const std::vector<float>& sorted, double q);

} // namespace flarekit
