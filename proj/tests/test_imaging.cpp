#include <fstream>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "thermovis/imaging/filters.hpp"
#include "thermovis/imaging/io.hpp"

using namespace thermovis;
using testing::max_abs_diff;
using testing::random_image;

namespace {

Image constant(int w, int h, int c, float v) { return Image(w, h, c, v); }

double variance(const Image& img) {
    const double mean = std::accumulate(img.values().begin(), img.values().end(), 0.0) / img.size();
    double acc = 0.0;
    for (float v : img.values()) acc += (v - mean) * (v - mean);
    return acc / img.size();
}

double mean_of(const Image& img) {
    return std::accumulate(img.values().begin(), img.values().end(), 0.0) / img.size();
}

Image combine(const Image& x, const Image& y, float a, float b) {
    Image out(x.width(), x.height(), x.channels());
    for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = a * x.values()[i] + b * y.values()[i];
    return out;
}

}  // namespace

TEST_CASE("to_grayscale uses Rec. 601 weights") {
    Rng rng(1);
    const Image gray = random_image(rng, 5, 4, 1);
    CHECK(to_grayscale(gray) == gray);
    CHECK(max_abs_diff(to_grayscale(constant(3, 3, 3, 0.5f)), constant(3, 3, 1, 0.5f)) < 1e-7);

    Image red(1, 1, 3);
    red.at(0, 0, 0) = 1.0f;
    CHECK(to_grayscale(red).at(0, 0, 0) == doctest::Approx(0.299).epsilon(1e-7));
    CHECK(testing::error_code_of([] { to_grayscale(Image(2, 2, 2)); }) == ErrorCode::invalid_argument);
}

TEST_CASE("mean_filter") {
    Rng rng(2);
    CHECK(max_abs_diff(mean_filter(constant(7, 5, 1, 0.3f), 3), constant(7, 5, 1, 0.3f)) < 1e-7);
    const Image img = random_image(rng, 9, 6, 3);
    CHECK(mean_filter(img, 1) == img);

    Image impulse(3, 3, 1);
    impulse.at(0, 1, 1) = 1.0f;
    const Image out = mean_filter(impulse, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) CHECK(out.at(0, y, x) == doctest::Approx(1.0 / 9.0).epsilon(1e-6));

    CHECK(testing::error_code_of([&] { mean_filter(img, 2); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { mean_filter(img, 0); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { mean_filter(img, -3); }) == ErrorCode::invalid_argument);
}

TEST_CASE("filters agree with direct 2-D convolution") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Image img = random_image(rng, 16, 16);
        CHECK(max_abs_diff(mean_filter(img, 3), oracle::convolve2d(img, oracle::box_kernel(3))) < 1e-6);
        CHECK(max_abs_diff(mean_filter(img, 5), oracle::convolve2d(img, oracle::box_kernel(5))) < 1e-6);
        const double sigma = rng.uniform(0.4, 2.5);
        CHECK(max_abs_diff(gaussian_blur(img, sigma), oracle::convolve2d(img, oracle::gaussian_kernel2d(sigma))) <
              1e-6);
        CHECK(max_abs_diff(dog_filter(img, 1.0, 2.0), oracle::dog(img, 1.0, 2.0)) < 1e-6);
    }
}

TEST_CASE("gaussian_blur") {
    CHECK(max_abs_diff(gaussian_blur(constant(12, 9, 1, 0.7f), 1.7), constant(12, 9, 1, 0.7f)) < 1e-6);

    Image impulse(15, 15, 1);
    impulse.at(0, 7, 7) = 1.0f;
    const auto kernel = oracle::gaussian_kernel2d(1.3);
    const Image blurred = gaussian_blur(impulse, 1.3);
    const int r = static_cast<int>(kernel.size() / 2);
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            CHECK(blurred.at(0, 7 + dy, 7 + dx) == doctest::Approx(kernel[dy + r][dx + r]).epsilon(1e-5));

    Rng rng(4);
    const Image img = random_image(rng, 10, 10, 3);
    CHECK(max_abs_diff(gaussian_blur(img, 0.01), img) < 1e-6);
    CHECK(testing::error_code_of([&] { gaussian_blur(img, 0.0); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { gaussian_blur(img, -1.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("dog_filter") {
    const Image flat = constant(20, 20, 1, 0.37f);
    const Image response = dog_response(flat, 1.0, 2.0);
    for (float v : response.values()) CHECK(v == 0.0f);
    CHECK(max_abs_diff(dog_filter(flat), constant(20, 20, 1, 0.5f)) == 0.0);

    SUBCASE("step edge peaks at the edge") {
        Image step(24, 8, 1);
        for (int y = 0; y < 8; ++y)
            for (int x = 12; x < 24; ++x) step.at(0, y, x) = 1.0f;
        const Image d = dog_response(step, 1.0, 2.0);
        const Image ref = oracle::convolve2d(step, oracle::gaussian_kernel2d(1.0));
        int argmax = 0, argmin = 0;
        for (int x = 0; x < 24; ++x) {
            if (d.at(0, 4, x) > d.at(0, 4, argmax)) argmax = x;
            if (d.at(0, 4, x) < d.at(0, 4, argmin)) argmin = x;
        }
        CHECK(std::abs(argmax - 12) <= 1);
        CHECK(std::abs(argmin - 11) <= 1);
        CHECK(ref.at(0, 4, 12) > 0.5f);
    }

    SUBCASE("impulse is centre-positive, surround-negative") {
        Image impulse(21, 21, 1);
        impulse.at(0, 10, 10) = 1.0f;
        const Image d = dog_response(impulse, 1.0, 2.0);
        CHECK(d.at(0, 10, 10) > 0.0f);
        CHECK(d.at(0, 10, 13) < 0.0f);
        CHECK(d.at(0, 13, 10) < 0.0f);
    }

    Rng rng(5);
    const Image img = random_image(rng, 8, 8);
    CHECK(testing::error_code_of([&] { dog_filter(img, 2.0, 1.0); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { dog_filter(img, 1.0, 1.0); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { dog_filter(random_image(rng, 8, 8, 3)); }) ==
          ErrorCode::invalid_argument);
    const Image out = dog_filter(img);
    CHECK(*std::min_element(out.values().begin(), out.values().end()) == 0.0f);
    CHECK(*std::max_element(out.values().begin(), out.values().end()) == 1.0f);
}

TEST_CASE("resize_bilinear") {
    Rng rng(6);
    const Image img = random_image(rng, 13, 11, 3);
    CHECK(max_abs_diff(resize_bilinear(img, 13, 11), img) < 1e-6);
    const Image c = resize_bilinear(constant(7, 9, 1, 0.25f), 31, 4);
    CHECK(c.width() == 31);
    CHECK(c.height() == 4);
    CHECK(max_abs_diff(c, constant(31, 4, 1, 0.25f)) < 1e-6);

    Image checker(2, 2, 1);
    checker.at(0, 0, 1) = 1.0f;
    checker.at(0, 1, 0) = 1.0f;
    CHECK(resize_bilinear(checker, 1, 1).at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(testing::error_code_of([&] { resize_bilinear(img, 0, 4); }) == ErrorCode::invalid_argument);
}

TEST_CASE("degrade_resolution") {
    const Image c = degrade_resolution(constant(300, 180, 1, 0.6f));
    CHECK(c.width() == 224);
    CHECK(c.height() == 224);
    CHECK(max_abs_diff(c, constant(224, 224, 1, 0.6f)) < 1e-6);

    Rng rng(7);
    const Image any = degrade_resolution(random_image(rng, 57, 91, 3));
    CHECK(any.width() == 224);
    CHECK(any.height() == 224);
    CHECK(any.channels() == 3);

    Image checker(224, 224, 1);
    for (int y = 0; y < 224; ++y)
        for (int x = 0; x < 224; ++x) checker.at(0, y, x) = static_cast<float>((x / 2 + y / 2) % 2);
    CHECK(variance(degrade_resolution(checker)) < variance(checker));
}

TEST_CASE("kernels are pure and linear") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const Image x = random_image(rng, 16, 16);
        const Image y = random_image(rng, 16, 16);
        const float a = static_cast<float>(rng.uniform(-2, 2)), b = static_cast<float>(rng.uniform(-2, 2));
        const Image xy = combine(x, y, a, b);
        CHECK(max_abs_diff(mean_filter(xy, 3), combine(mean_filter(x, 3), mean_filter(y, 3), a, b)) < 1e-6);
        CHECK(max_abs_diff(gaussian_blur(xy, 1.2), combine(gaussian_blur(x, 1.2), gaussian_blur(y, 1.2), a, b)) <
              1e-6);
        CHECK(max_abs_diff(dog_response(xy, 1, 2), combine(dog_response(x, 1, 2), dog_response(y, 1, 2), a, b)) <
              1e-6);
        CHECK(max_abs_diff(resize_bilinear(xy, 23, 9),
                           combine(resize_bilinear(x, 23, 9), resize_bilinear(y, 23, 9), a, b)) < 1e-6);
        CHECK(gaussian_blur(x, 1.5) == gaussian_blur(x, 1.5));
        CHECK(dog_filter(x) == dog_filter(x));
    }
}

TEST_CASE("blurs preserve the mean of interior-dominated images") {
    Rng rng(9);
    const Image img = random_image(rng, 128, 128);
    CHECK(std::abs(mean_of(gaussian_blur(img, 1.5)) - mean_of(img)) < 1e-3);
    CHECK(std::abs(mean_of(mean_filter(img, 3)) - mean_of(img)) < 1e-3);
}

TEST_CASE("image io") {
    testing::TempDir dir("io");
    Rng rng(10);
    const Image rgb = random_image(rng, 17, 9, 3);
    save_image(dir.path() / "a.png", rgb);
    const Image back = load_image(dir.path() / "a.png");
    CHECK(back.channels() == 3);
    CHECK(max_abs_diff(back, rgb) <= 0.5 / 255.0 + 1e-6);

    save_raw(dir.path() / "a.raw", rgb);
    CHECK(load_raw(dir.path() / "a.raw") == rgb);

    std::ofstream(dir.path() / "bad.png") << "not an image";
    CHECK(testing::error_code_of([&] { load_image(dir.path() / "bad.png"); }) == ErrorCode::io_error);
    CHECK(testing::error_code_of([&] { load_image(dir.path() / "missing.png"); }) == ErrorCode::io_error);
}
