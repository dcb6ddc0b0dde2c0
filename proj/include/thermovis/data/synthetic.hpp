#pragma once

#include <cstdint>
#include <filesystem>

#include "thermovis/alignment/landmarks.hpp"
#include "thermovis/data/manifest.hpp"
#include "thermovis/imaging/image.hpp"

namespace thermovis {

struct SyntheticConfig {
    int n_subjects = 50;
    int images_per_subject = 12;
    std::uint64_t seed = 7;
    int size = 224;
};

struct SyntheticPair {
    Image visible;  // RGB
    Image thermal;  // 1 channel
    LandmarkSet landmarks;  // shared by both modalities
};

/// Renders image `index` of `subject` without touching the disk.
SyntheticPair render_synthetic_pair(const SyntheticConfig& cfg, int subject, int index);

/// Deterministic pseudo-thermal counterpart of a visible image: inverted
/// luminance raised to 1.5, squeezed into [0.05, 0.95], then blurred.
Image pseudo_thermal(const Image& visible);

/// Writes `<out>/<subject>/{visible,thermal}/<tag>.png`, `landmarks.csv`
/// and `manifest.csv`, and returns the manifest (landmarks attached).
DatasetManifest generate_synthetic(const SyntheticConfig& cfg, const std::filesystem::path& out);

}  // namespace thermovis
