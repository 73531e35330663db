#include "flarekit/metrics.hpp"

#include "flarekit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace flarekit::metrics {

double psnr(const LinearImage& a, const LinearImage& b) {
    if (!a.same_shape(b)) throw ShapeError("PSNR of differently sized images");
    const auto x = a.data();
    const auto y = b.data();
    if (x.empty()) throw ParameterError("PSNR of empty images");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - y[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(x.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> taps(size);
    const double centre = (size - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - centre;
        taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        total += taps[i];
    }
    for (auto& t : taps) t /= total;
    return taps;
}

namespace {

// Separable "valid" filtering: output is (w - n + 1) x (h - n + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& taps) {
    const int n = static_cast<int>(taps.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * src[static_cast<std::size_t>(y) * w + x + k];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

} // namespace

double ssim(const IlluminanceMap& a, const IlluminanceMap& b, const SsimConfig& config) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ShapeError("SSIM of differently sized images");
    }
    if (config.window < 1 || !(config.sigma > 0.0)) {
        throw ParameterError("SSIM window must be >= 1 with sigma > 0");
    }
    const int w = a.width();
    const int h = a.height();
    if (w < config.window || h < config.window) {
        throw ParameterError("SSIM needs images of at least " + std::to_string(config.window) +
                             "x" + std::to_string(config.window) + ", got " +
                             std::to_string(w) + "x" + std::to_string(h));
    }

    const std::size_t n = a.size();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = a[i];
        y[i] = b[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto taps = gaussian_taps(config.window, config.sigma);
    const auto mu_x = filter_valid(x, w, h, taps);
    const auto mu_y = filter_valid(y, w, h, taps);
    const auto e_xx = filter_valid(xx, w, h, taps);
    const auto e_yy = filter_valid(yy, w, h, taps);
    const auto e_xy = filter_valid(xy, w, h, taps);

    const double c1 = std::pow(config.k1 * config.dynamic_range, 2);
    const double c2 = std::pow(config.k2 * config.dynamic_range, 2);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i];
        const double my = mu_y[i];
        const double vx = e_xx[i] - mx * mx;
        const double vy = e_yy[i] - my * my;
        const double cov = e_xy[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

double ssim(const LinearImage& a, const LinearImage& b, const SsimConfig& config) {
    if (!a.same_shape(b)) throw ShapeError("SSIM of differently sized images");
    return ssim(illuminance(a), illuminance(b), config);
}

ShiftReport shift_report(const LinearImage& a, const LinearImage& b, int bins) {
    ShiftReport r;
    r.hist_a = histogram(a, bins);
    r.hist_b = histogram(b, bins);
    r.mean_a = r.hist_a.mean;
    r.mean_b = r.hist_b.mean;
    r.mean_delta = r.mean_b - r.mean_a;
    r.p10_delta = r.hist_b.p10 - r.hist_a.p10;
    r.p50_delta = r.hist_b.p50 - r.hist_a.p50;
    r.p90_delta = r.hist_b.p90 - r.hist_a.p90;
    return r;
}

} // namespace flarekit::metrics
