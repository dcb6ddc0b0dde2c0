#pragma once

#include <filesystem>

#include "thermovis/imaging/image.hpp"

namespace thermovis {

/// Decodes PNG/JPEG/BMP (anything OpenCV reads). 8-bit samples are divided
/// by 255, 16-bit by 65535. Colour files come back as 3-channel RGB.
Image load_image(const std::filesystem::path& path);

/// Encodes by extension; values are clamped to [0, 1] and rounded to 8 bits.
void save_image(const std::filesystem::path& path, const Image& img);

/// Lossless float raster used for the preprocessing cache:
/// "TVIMG001", u32 width, u32 height, u32 channels, then float32 planes,
/// all little-endian.
void save_raw(const std::filesystem::path& path, const Image& img);
Image load_raw(const std::filesystem::path& path);

}  // namespace thermovis
