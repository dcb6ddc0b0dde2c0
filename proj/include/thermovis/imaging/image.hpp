#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thermovis {

/// Planar float raster. Pixel (x, y) of channel c lives at
/// data[(c * height + y) * width + x]; colour images are stored R, G, B.
/// Intensities are nominally in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);
    Image(int width, int height, int channels, std::vector<float> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
    float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

    std::span<float> plane(int c) noexcept {
        return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
    }
    std::span<const float> plane(int c) const noexcept {
        return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
    }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }
    const std::vector<float>& values() const noexcept { return data_; }

    bool operator==(const Image&) const = default;

private:
    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
                static_cast<std::size_t>(y)) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

}  // namespace thermovis
