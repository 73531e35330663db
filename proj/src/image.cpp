#include "flarekit/image.hpp"

#include "flarekit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flarekit {

namespace {

void check_dims(int width, int height) {
    if (width < 0 || height < 0) {
        throw ShapeError("negative image dimensions " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
}

void check_unit_range(std::span<const float> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = values[i];
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
            throw ParameterError(std::string(what) + " sample " + std::to_string(i) +
                                 " outside [0,1]: " + std::to_string(v));
        }
    }
}

} // namespace

LinearImage::LinearImage(int width, int height)
    : LinearImage(width, height,
                  std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                     static_cast<std::size_t>(std::max(height, 0)) * kChannels)) {}

LinearImage::LinearImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count() * kChannels) {
        throw ShapeError("linear image data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height) + "x3");
    }
    check_unit_range(data_, "linear image");
}

LinearImage LinearImage::filled(int width, int height, float value) {
    check_dims(width, height);
    return LinearImage(width, height,
                       std::vector<float>(static_cast<std::size_t>(width) * height * kChannels,
                                          value));
}

EncodedImage::EncodedImage(int width, int height, int bit_depth,
                           std::vector<std::uint16_t> samples)
    : width_(width), height_(height), bit_depth_(bit_depth), samples_(std::move(samples)) {
    check_dims(width, height);
    if (bit_depth != 8 && bit_depth != 16) {
        throw ParameterError("unsupported bit depth " + std::to_string(bit_depth));
    }
    if (samples_.size() != pixel_count() * kChannels) {
        throw ShapeError("encoded image sample count " + std::to_string(samples_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height) + "x3");
    }
    const auto limit = max_value();
    for (auto s : samples_) {
        if (s > limit) {
            throw ParameterError("sample " + std::to_string(s) + " exceeds " +
                                 std::to_string(bit_depth) + "-bit range");
        }
    }
}

template <class Tag>
ScalarMap<Tag>::ScalarMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ShapeError("map length " + std::to_string(values_.size()) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
    check_unit_range(values_, "map");
}

template class ScalarMap<IlluminanceTag>;
template class ScalarMap<WeightTag>;

} // namespace flarekit
