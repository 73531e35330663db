#pragma once

#include "flarekit/color.hpp"
#include "flarekit/image.hpp"

namespace flarekit::metrics {

/// Reported for identical images instead of +infinity; also the upper bound
/// of every PSNR value.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over all samples, peak 1.0. Throws ShapeError.
double psnr(const LinearImage& a, const LinearImage& b);

struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over every fully contained window position, computed on the
/// per-pixel illuminance. Throws ShapeError on mismatched dimensions and
/// ParameterError for images smaller than the window.
double ssim(const LinearImage& a, const LinearImage& b, const SsimConfig& config = {});
double ssim(const IlluminanceMap& a, const IlluminanceMap& b, const SsimConfig& config = {});

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(int size, double sigma);

struct ShiftReport {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double mean_delta = 0.0; // all deltas are b minus a
    double p10_delta = 0.0;
    double p50_delta = 0.0;
    double p90_delta = 0.0;
    Histogram hist_a;
    Histogram hist_b;
};

/// Illuminance distribution of b relative to a. Throws ParameterError for bins < 2.
ShiftReport shift_report(const LinearImage& a, const LinearImage& b, int bins);

} // namespace flarekit::metrics
