#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flarekit {

/// RGB image in inverse-gamma (linear-proxy) space. Samples are row-major,
/// channel-interleaved R,G,B, each finite and within [0,1]. Immutable once
/// constructed; every constructor validates.
class LinearImage {
public:
    static constexpr int kChannels = 3;

    LinearImage() = default;
    /// All-black image.
    LinearImage(int width, int height);
    /// Takes ownership of `data`; throws ShapeError on a length mismatch and
    /// ParameterError on a non-finite or out-of-range sample.
    LinearImage(int width, int height, std::vector<float> data);

    /// Constant-valued image.
    static LinearImage filled(int width, int height, float value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool empty() const noexcept { return pixel_count() == 0; }
    bool same_shape(const LinearImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    float at(int x, int y, int c) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
    }
    std::span<const float> data() const noexcept { return data_; }

    friend bool operator==(const LinearImage&, const LinearImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Gamma-encoded integer RGB image as stored on disk (8 or 16 bits per sample).
class EncodedImage {
public:
    static constexpr int kChannels = 3;

    EncodedImage() = default;
    /// Throws ParameterError for a depth other than 8/16 or an out-of-range
    /// sample, ShapeError on a length mismatch.
    EncodedImage(int width, int height, int bit_depth, std::vector<std::uint16_t> samples);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int bit_depth() const noexcept { return bit_depth_; }
    std::uint32_t max_value() const noexcept { return (1u << bit_depth_) - 1u; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool same_shape(const EncodedImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    std::uint16_t at(int x, int y, int c) const noexcept {
        return samples_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
    }
    std::span<const std::uint16_t> samples() const noexcept { return samples_; }

    friend bool operator==(const EncodedImage&, const EncodedImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int bit_depth_ = 8;
    std::vector<std::uint16_t> samples_;
};

/// Single-channel H*W map with values in [0,1]. The tag keeps illuminance and
/// weight maps from being mixed up at call sites.
template <class Tag>
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(int width, int height, std::vector<float> values);

    static ScalarMap filled(int width, int height, float value) {
        return ScalarMap(width, height,
                         std::vector<float>(static_cast<std::size_t>(width) * height, value));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    float at(int x, int y) const noexcept {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }
    float operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const float> values() const noexcept { return values_; }

    template <class Image>
    bool matches(const Image& img) const noexcept {
        return width_ == img.width() && height_ == img.height();
    }

    friend bool operator==(const ScalarMap&, const ScalarMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

struct IlluminanceTag {};
struct WeightTag {};

using IlluminanceMap = ScalarMap<IlluminanceTag>;
using WeightMap = ScalarMap<WeightTag>;

extern template class ScalarMap<IlluminanceTag>;
extern template class ScalarMap<WeightTag>;

} // namespace flarekit
