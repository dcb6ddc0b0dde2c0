#include "thermovis/imaging/image.hpp"

#include <string>

#include "thermovis/core/error.hpp"

namespace thermovis {

namespace {
void check_dims(int width, int height, int channels) {
    if (width < 0 || height < 0) {
        throw Error(ErrorCode::invalid_argument, "image dimensions must be non-negative");
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::invalid_argument,
                    "unsupported channel count " + std::to_string(channels));
    }
}
}  // namespace

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(channels),
                 fill);
}

Image::Image(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels)) {
        throw Error(ErrorCode::shape_mismatch, "image data length does not match dimensions");
    }
}

}  // namespace thermovis
