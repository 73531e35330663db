#include "flarekit/recovery.hpp"

#include "flarekit/errors.hpp"
#include "flarekit/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace flarekit {

namespace {

void check_alpha(double alpha) {
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw ParameterError("recovery alpha must be finite and > 0, got " +
                             std::to_string(alpha));
    }
}

double channel_sum(double a, double b, double c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a + b) + c;
}

std::vector<double> channel_sums(const LinearImage& img) {
    const auto d = img.data();
    std::vector<double> sums(img.pixel_count());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        sums[i] = channel_sum(d[3 * i], d[3 * i + 1], d[3 * i + 2]);
    }
    return sums;
}

void check_same_shape(const LinearImage& a, const LinearImage& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("deflared image " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()) + " does not match input " +
                         std::to_string(a.width()) + "x" + std::to_string(a.height()));
    }
}

} // namespace

WeightMap recovery_weights(const LinearImage& input, double alpha) {
    check_alpha(alpha);
    if (input.empty()) throw ParameterError("recovery needs a non-empty image");

    const auto sums = channel_sums(input);
    const auto [lo_it, hi_it] = std::minmax_element(sums.begin(), sums.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        throw DegenerateInputError("constant-illuminance image: no light source to recover");
    }
    const double range = hi - lo;
    std::vector<float> w(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const double normalized = (sums[i] - lo) / range;
        w[i] = static_cast<float>(std::pow(normalized, alpha));
    }
    return WeightMap(input.width(), input.height(), std::move(w));
}

LinearImage recover_with_weights(const LinearImage& input, const LinearImage& deflared,
                                 const WeightMap& weights) {
    check_same_shape(input, deflared);
    if (!weights.matches(input)) throw ShapeError("weight map does not match image dimensions");

    const auto c = input.data();
    const auto n = deflared.data();
    const auto w = weights.values();
    std::vector<float> out(c.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double wi = w[i / LinearImage::kChannels];
        out[i] = static_cast<float>((1.0 - wi) * n[i] + wi * c[i]);
    }
    return LinearImage(input.width(), input.height(), std::move(out));
}

LinearImage recover(const LinearImage& input, const LinearImage& deflared, double alpha,
                    const WarningSink& warn) {
    check_same_shape(input, deflared);
    try {
        return recover_with_weights(input, deflared, recovery_weights(input, alpha));
    } catch (const DegenerateInputError& e) {
        if (warn) warn(std::string(e.what()) + "; returning the deflared image unchanged");
        return deflared;
    }
}

AlphaSweep alpha_sweep(const LinearImage& input, const LinearImage& deflared,
                       std::span<const double> alphas, const WarningSink& warn) {
    if (alphas.empty()) throw ParameterError("alpha sweep needs at least one alpha");
    AlphaSweep sweep;
    sweep.alphas.assign(alphas.begin(), alphas.end());
    for (double a : alphas) sweep.outputs.push_back(recover(input, deflared, a, warn));
    for (std::size_t i = 1; i < sweep.outputs.size(); ++i) {
        sweep.linf_steps.push_back(linf_distance(sweep.outputs[i - 1], sweep.outputs[i]));
    }
    return sweep;
}

double linf_distance(const LinearImage& a, const LinearImage& b) {
    if (!a.same_shape(b)) throw ShapeError("L-infinity distance of differently sized images");
    double m = 0.0;
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(x[i]) - y[i]));
    }
    return m;
}

double l1_distance(const LinearImage& a, const LinearImage& b) {
    if (!a.same_shape(b)) throw ShapeError("L1 distance of differently sized images");
    double s = 0.0;
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(static_cast<double>(x[i]) - y[i]);
    return s;
}

UniformDarken::UniformDarken(double factor) : factor_(factor) {
    if (!(factor >= 0.0 && factor <= 1.0)) {
        throw ParameterError("darken factor must lie in [0,1]");
    }
}

LinearImage UniformDarken::apply(const LinearImage& input) const {
    const auto d = input.data();
    std::vector<float> out(d.size());
    std::transform(d.begin(), d.end(), out.begin(),
                   [&](float v) { return static_cast<float>(v * factor_); });
    return LinearImage(input.width(), input.height(), std::move(out));
}

GaussianBlur::GaussianBlur(int radius) : radius_(radius) {
    if (radius < 0) throw ParameterError("blur radius must be >= 0");
    kernel_.assign(2 * radius + 1, 0.0);
    if (radius == 0) {
        kernel_[0] = 1.0;
        return;
    }
    const double sigma = radius / 2.0;
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel_[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += kernel_[i + radius];
    }
    for (auto& k : kernel_) k /= total;
}

LinearImage GaussianBlur::apply(const LinearImage& input) const {
    const int w = input.width();
    const int h = input.height();
    if (input.empty() || radius_ == 0) return input;

    std::vector<double> tmp(input.data().size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius_; k <= radius_; ++k) {
                    const int xs = std::clamp(x + k, 0, w - 1);
                    acc += kernel_[k + radius_] * input.at(xs, y, c);
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
            }
        }
    }
    std::vector<float> out(tmp.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius_; k <= radius_; ++k) {
                    const int ys = std::clamp(y + k, 0, h - 1);
                    acc += kernel_[k + radius_] * tmp[(static_cast<std::size_t>(ys) * w + x) * 3 + c];
                }
                out[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
                    static_cast<float>(std::clamp(acc, 0.0, 1.0));
            }
        }
    }
    return LinearImage(w, h, std::move(out));
}

ExternalDeflare::ExternalDeflare(std::filesystem::path path, double gamma)
    : path_(std::move(path)), gamma_(gamma) {}

LinearImage ExternalDeflare::apply(const LinearImage& input) const {
    LinearImage deflared = io::read_linear(path_, gamma_);
    check_same_shape(input, deflared);
    return deflared;
}

} // namespace flarekit
