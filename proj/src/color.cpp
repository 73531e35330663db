#include "flarekit/color.hpp"

#include "flarekit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flarekit {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("gamma must be positive, got " + std::to_string(gamma));
    }
}

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(what) + " outside [0,1]: " + std::to_string(v));
    }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Sum of three samples in a fixed (ascending) order so the result does not
// depend on channel order.
double channel_sum(double a, double b, double c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a + b) + c;
}

} // namespace

double gamma_decode_sample(std::uint32_t sample, std::uint32_t max_value, double gamma) {
    return std::pow(static_cast<double>(sample) / static_cast<double>(max_value), gamma);
}

std::uint16_t gamma_encode_sample(double value, std::uint32_t max_value, double gamma) {
    const double v = std::clamp(value, 0.0, 1.0);
    const double q = std::round(std::pow(v, 1.0 / gamma) * static_cast<double>(max_value));
    return static_cast<std::uint16_t>(std::clamp(q, 0.0, static_cast<double>(max_value)));
}

LinearImage gamma_decode(const EncodedImage& img, double gamma) {
    check_gamma(gamma);
    const auto max_value = img.max_value();
    // One table entry per code value keeps decode cheap and exactly repeatable.
    std::vector<float> lut(max_value + 1);
    for (std::uint32_t s = 0; s <= max_value; ++s) {
        lut[s] = static_cast<float>(gamma_decode_sample(s, max_value, gamma));
    }
    const auto samples = img.samples();
    std::vector<float> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(),
                   [&](std::uint16_t s) { return lut[s]; });
    return LinearImage(img.width(), img.height(), std::move(out));
}

EncodedImage gamma_encode(const LinearImage& img, double gamma, int bit_depth) {
    check_gamma(gamma);
    if (bit_depth != 8 && bit_depth != 16) {
        throw ParameterError("unsupported bit depth " + std::to_string(bit_depth));
    }
    const std::uint32_t max_value = (1u << bit_depth) - 1u;
    const auto data = img.data();
    std::vector<std::uint16_t> out(data.size());
    std::transform(data.begin(), data.end(), out.begin(),
                   [&](float v) { return gamma_encode_sample(v, max_value, gamma); });
    return EncodedImage(img.width(), img.height(), bit_depth, std::move(out));
}

ToneMapOp::ToneMapOp(Kind kind, double k, double m) : kind_(kind), k_(k), m_(m) {
    if (kind_ == Kind::Logistic) {
        lo_ = sigmoid(-k_ * m_);
        span_ = sigmoid(k_ * (1.0 - m_)) - lo_;
    }
}

ToneMapOp ToneMapOp::logistic(double steepness, double midpoint) {
    if (!std::isfinite(steepness) || !std::isfinite(midpoint) || !(steepness > 0.0)) {
        throw ParameterError("logistic tone curve needs finite k > 0 and finite midpoint");
    }
    return ToneMapOp(Kind::Logistic, steepness, midpoint);
}

double ToneMapOp::forward(double x) const {
    check_unit(x, "tone curve input");
    switch (kind_) {
    case Kind::SmoothStep:
        return x * x * (3.0 - 2.0 * x);
    case Kind::Logistic:
        if (x == 0.0) return 0.0;
        if (x == 1.0) return 1.0;
        return std::clamp((sigmoid(k_ * (x - m_)) - lo_) / span_, 0.0, 1.0);
    }
    return x;
}

double ToneMapOp::inverse(double y) const {
    check_unit(y, "tone curve output");
    switch (kind_) {
    case Kind::SmoothStep: {
        // Root of 2x^3 - 3x^2 + y = 0 lying in [0,1].
        const double x = 0.5 - std::sin(std::asin(1.0 - 2.0 * y) / 3.0);
        return std::clamp(x, 0.0, 1.0);
    }
    case Kind::Logistic: {
        if (y == 0.0) return 0.0;
        if (y == 1.0) return 1.0;
        const double s = lo_ + y * span_;
        return std::clamp(m_ + std::log(s / (1.0 - s)) / k_, 0.0, 1.0);
    }
    }
    return y;
}

IlluminanceMap illuminance(const LinearImage& img) {
    const auto data = img.data();
    std::vector<float> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double sum = channel_sum(data[3 * i], data[3 * i + 1], data[3 * i + 2]);
        out[i] = static_cast<float>(std::min(sum / 3.0, 1.0));
    }
    return IlluminanceMap(img.width(), img.height(), std::move(out));
}

IlluminanceMap illuminance(const EncodedImage& img) {
    const auto samples = img.samples();
    const double denom = 3.0 * static_cast<double>(img.max_value());
    std::vector<float> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint32_t sum = std::uint32_t{samples[3 * i]} + samples[3 * i + 1] +
                                  samples[3 * i + 2];
        out[i] = static_cast<float>(sum / denom);
    }
    return IlluminanceMap(img.width(), img.height(), std::move(out));
}

int histogram_bin(double value, int bins) noexcept {
    const auto idx = static_cast<int>(std::floor(value * bins));
    return std::clamp(idx, 0, bins - 1);
}

double sorted_quantile(const std::vector<float>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (static_cast<double>(sorted[hi]) - sorted[lo]);
}

Histogram histogram(const IlluminanceMap& illum, int bins) {
    if (bins < 2) {
        throw ParameterError("histogram needs at least 2 bins, got " + std::to_string(bins));
    }
    Histogram h;
    h.bins = bins;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = static_cast<double>(i) / bins;
    h.counts.assign(bins, 0);

    const auto values = illum.values();
    double sum = 0.0;
    for (float v : values) {
        ++h.counts[histogram_bin(v, bins)];
        sum += v;
    }
    h.total = values.size();
    if (h.total == 0) return h;

    h.mean = sum / static_cast<double>(h.total);
    std::vector<float> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    h.p10 = sorted_quantile(sorted, 0.10);
    h.p50 = sorted_quantile(sorted, 0.50);
    h.p90 = sorted_quantile(sorted, 0.90);
    return h;
}

Histogram histogram(const LinearImage& img, int bins) {
    if (bins < 2) {
        throw ParameterError("histogram needs at least 2 bins, got " + std::to_string(bins));
    }
    return histogram(illuminance(img), bins);
}

} // namespace flarekit
