#include "thermovis/imaging/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "thermovis/core/error.hpp"

namespace thermovis {

namespace {

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

// Separable correlation with a symmetric kernel, edge replication.
Image separable(const Image& img, const std::vector<double>& kernel) {
    const int w = img.width();
    const int h = img.height();
    const int r = static_cast<int>(kernel.size() / 2);
    Image out(w, h, img.channels());
    std::vector<double> tmp(img.pixel_count());
    for (int c = 0; c < img.channels(); ++c) {
        const auto src = img.plane(c);
        for (int y = 0; y < h; ++y) {
            const float* row = src.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -r; i <= r; ++i) {
                    acc += kernel[static_cast<std::size_t>(i + r)] * row[clamp_index(x + i, w)];
                }
                tmp[static_cast<std::size_t>(y) * w + x] = acc;
            }
        }
        auto dst = out.plane(c);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -r; i <= r; ++i) {
                    acc += kernel[static_cast<std::size_t>(i + r)] *
                           tmp[static_cast<std::size_t>(clamp_index(y + i, h)) * w + x];
                }
                dst[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace

Image to_grayscale(const Image& img) {
    if (img.channels() == 1) return img;
    if (img.channels() != 3) {
        throw Error(ErrorCode::invalid_argument,
                    "to_grayscale: unsupported channel count " + std::to_string(img.channels()));
    }
    Image out(img.width(), img.height(), 1);
    const auto r = img.plane(0);
    const auto g = img.plane(1);
    const auto b = img.plane(2);
    auto dst = out.plane(0);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
    }
    return out;
}

Image expand_channels(const Image& img, int channels) {
    if (img.channels() == channels) return img;
    if (img.channels() != 1) {
        throw Error(ErrorCode::invalid_argument, "expand_channels expects a 1-channel image");
    }
    Image out(img.width(), img.height(), channels);
    for (int c = 0; c < channels; ++c) {
        std::copy(img.plane(0).begin(), img.plane(0).end(), out.plane(c).begin());
    }
    return out;
}

Image mean_filter(const Image& img, int k) {
    if (k < 1 || k % 2 == 0) {
        throw Error(ErrorCode::invalid_argument,
                    "mean_filter: window size must be odd and positive, got " + std::to_string(k));
    }
    const std::vector<double> box(static_cast<std::size_t>(k), 1.0 / k);
    return separable(img, box);
}

Image gaussian_blur(const Image& img, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::invalid_argument, "gaussian_blur: sigma must be positive");
    }
    return separable(img, gaussian_kernel(sigma));
}

Image dog_response(const Image& img, double sigma_inner, double sigma_outer) {
    if (img.channels() != 1) {
        throw Error(ErrorCode::invalid_argument, "dog_filter: expects a 1-channel image");
    }
    if (!(sigma_inner > 0.0) || !(sigma_inner < sigma_outer)) {
        throw Error(ErrorCode::invalid_argument,
                    "dog_filter: requires 0 < sigma_inner < sigma_outer");
    }
    const Image inner = gaussian_blur(img, sigma_inner);
    const Image outer = gaussian_blur(img, sigma_outer);
    Image out(img.width(), img.height(), 1);
    auto dst = out.data();
    const auto a = inner.data();
    const auto b = outer.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] - b[i];
    return out;
}

Image dog_filter(const Image& img, double sigma_inner, double sigma_outer) {
    return min_max_rescale(dog_response(img, sigma_inner, sigma_outer));
}

Image min_max_rescale(const Image& img) {
    Image out(img.width(), img.height(), img.channels());
    if (img.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    auto dst = out.data();
    if (!(hi > lo)) {
        std::fill(dst.begin(), dst.end(), 0.5f);
        return out;
    }
    const double scale = 1.0 / (hi - lo);
    const auto src = img.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<float>(std::clamp((src[i] - lo) * scale, 0.0, 1.0));
    }
    return out;
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw Error(ErrorCode::invalid_argument, "resize_bilinear: target size must be positive");
    }
    if (img.width() < 1 || img.height() < 1) {
        throw Error(ErrorCode::invalid_argument, "resize_bilinear: empty source image");
    }
    const int in_w = img.width();
    const int in_h = img.height();
    const double sx = static_cast<double>(in_w) / out_w;
    const double sy = static_cast<double>(in_h) / out_h;

    struct Tap {
        int i0, i1;
        double f;
    };
    auto taps = [](int n_out, int n_in, double scale) {
        std::vector<Tap> t(static_cast<std::size_t>(n_out));
        for (int o = 0; o < n_out; ++o) {
            const double src = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
            const int i0 = static_cast<int>(std::floor(src));
            const int i1 = std::min(i0 + 1, n_in - 1);
            t[static_cast<std::size_t>(o)] = {i0, i1, src - i0};
        }
        return t;
    };
    const auto tx = taps(out_w, in_w, sx);
    const auto ty = taps(out_h, in_h, sy);

    Image out(out_w, out_h, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        const auto src = img.plane(c);
        auto dst = out.plane(c);
        for (int y = 0; y < out_h; ++y) {
            const Tap& vy = ty[static_cast<std::size_t>(y)];
            const float* r0 = src.data() + static_cast<std::size_t>(vy.i0) * in_w;
            const float* r1 = src.data() + static_cast<std::size_t>(vy.i1) * in_w;
            for (int x = 0; x < out_w; ++x) {
                const Tap& vx = tx[static_cast<std::size_t>(x)];
                const double top = r0[vx.i0] + vx.f * (r0[vx.i1] - r0[vx.i0]);
                const double bottom = r1[vx.i0] + vx.f * (r1[vx.i1] - r1[vx.i0]);
                dst[static_cast<std::size_t>(y) * out_w + x] =
                    static_cast<float>(top + vy.f * (bottom - top));
            }
        }
    }
    return out;
}

Image degrade_resolution(const Image& img, int low, int out) {
    return resize_bilinear(resize_bilinear(img, low, low), out, out);
}

}  // namespace thermovis
