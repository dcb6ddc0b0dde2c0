#include "thermovis/imaging/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "thermovis/core/error.hpp"

namespace thermovis {

static_assert(std::endian::native == std::endian::little,
              "raw raster I/O assumes a little-endian host");

namespace {
constexpr std::array<char, 8> kRawMagic = {'T', 'V', 'I', 'M', 'G', '0', '0', '1'};
}

Image load_image(const std::filesystem::path& path) {
    const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
    if (mat.empty()) {
        throw Error(ErrorCode::io_error, "cannot decode image: " + path.string());
    }
    double scale = 1.0;
    switch (mat.depth()) {
        case CV_8U: scale = 1.0 / 255.0; break;
        case CV_16U: scale = 1.0 / 65535.0; break;
        case CV_32F: scale = 1.0; break;
        default:
            throw Error(ErrorCode::format_error, "unsupported sample depth: " + path.string());
    }
    cv::Mat f;
    mat.convertTo(f, CV_32F, scale);

    const int src_channels = f.channels();
    const int channels = src_channels == 1 ? 1 : 3;
    Image img(f.cols, f.rows, channels);
    for (int y = 0; y < f.rows; ++y) {
        const float* row = f.ptr<float>(y);
        for (int x = 0; x < f.cols; ++x) {
            const float* px = row + static_cast<std::ptrdiff_t>(x) * src_channels;
            if (channels == 1) {
                img.at(0, y, x) = px[0];
            } else {
                // OpenCV stores BGR(A).
                img.at(0, y, x) = px[2];
                img.at(1, y, x) = px[1];
                img.at(2, y, x) = px[0];
            }
        }
    }
    return img;
}

void save_image(const std::filesystem::path& path, const Image& img) {
    const int type = img.channels() == 1 ? CV_8UC1 : CV_8UC3;
    cv::Mat mat(img.height(), img.width(), type);
    auto to_u8 = [](float v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    };
    for (int y = 0; y < img.height(); ++y) {
        auto* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width(); ++x) {
            if (img.channels() == 1) {
                row[x] = to_u8(img.at(0, y, x));
            } else {
                row[3 * x + 0] = to_u8(img.at(2, y, x));
                row[3 * x + 1] = to_u8(img.at(1, y, x));
                row[3 * x + 2] = to_u8(img.at(0, y, x));
            }
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::io_error, "cannot write image " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::io_error, "cannot write image: " + path.string());
}

void save_raw(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path.string());
    out.write(kRawMagic.data(), kRawMagic.size());
    const std::array<std::uint32_t, 3> dims = {static_cast<std::uint32_t>(img.width()),
                                               static_cast<std::uint32_t>(img.height()),
                                               static_cast<std::uint32_t>(img.channels())};
    out.write(reinterpret_cast<const char*>(dims.data()), sizeof(dims));
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.size() * sizeof(float)));
    if (!out) throw Error(ErrorCode::io_error, "write failed: " + path.string());
}

Image load_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open: " + path.string());
    std::array<char, 8> magic{};
    std::array<std::uint32_t, 3> dims{};
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(dims.data()), sizeof(dims));
    if (!in || magic != kRawMagic) {
        throw Error(ErrorCode::format_error, "not a raw raster: " + path.string());
    }
    if (dims[0] > 65536 || dims[1] > 65536 || (dims[2] != 1 && dims[2] != 3)) {
        throw Error(ErrorCode::format_error, "implausible raster header: " + path.string());
    }
    std::vector<float> data(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!in) throw Error(ErrorCode::format_error, "truncated raster: " + path.string());
    return Image(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                 static_cast<int>(dims[2]), std::move(data));
}

}  // namespace thermovis
