#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "thermovis/core/error.hpp"
#include "thermovis/core/random.hpp"
#include "thermovis/imaging/image.hpp"

namespace testing {

inline thermovis::Image random_image(thermovis::Rng& rng, int w, int h, int c = 1) {
    thermovis::Image img(w, h, c);
    for (float& v : img.data()) v = static_cast<float>(rng.uniform());
    return img;
}

inline double max_abs_diff(const thermovis::Image& a, const thermovis::Image& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(a.values()[i]) - b.values()[i]));
    return worst;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        thermovis::Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(std::rand()));
        path_ = std::filesystem::temp_directory_path() /
                ("thermovis-" + tag + "-" + std::to_string(rng.next_u64() % 1000000007ULL));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

template <typename F>
thermovis::ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const thermovis::Error& e) {
        return e.code();
    }
    FAIL("expected a thermovis::Error");
    return thermovis::ErrorCode::invalid_argument;
}

}  // namespace testing
