#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thermovis/alignment/landmarks.hpp"
#include "thermovis/data/manifest.hpp"
#include "thermovis/imaging/image.hpp"
#include "thermovis/pipeline/descriptor.hpp"

namespace thermovis {

/// The preprocessing chain for one image. Visible images end with
/// `input_channels` channels (a DoG result is replicated when 3 are needed),
/// thermal images with one.
Image preprocess_image(const Image& raw, Modality modality, const std::optional<LandmarkSet>& landmarks,
                       const PreprocessFlags& flags, int input_channels);

struct PreprocessFailure {
    std::string image_path;
    std::string message;
};

struct PreprocessSummary {
    std::size_t total = 0;
    std::size_t processed = 0;  // computed in this call
    std::size_t cached = 0;     // already up to date
    std::vector<PreprocessFailure> failures;
    std::map<std::string, std::filesystem::path> files;  // image path -> cache file

    nlohmann::json to_json() const;
};

/// Processes every sample of the manifest into `cache_dir`. Entries are keyed
/// by a hash of the source bytes, landmarks, flags, modality and channel
/// count, so an unchanged image is never processed twice. A file that fails
/// is reported and skipped. With alignment on, samples without landmarks are
/// an error that lists them.
PreprocessSummary preprocess_dataset(const DatasetManifest& manifest, const PreprocessFlags& flags,
                                     int input_channels, const std::filesystem::path& cache_dir, int workers = 1);

/// The manifest without the failed samples (pairs re-derived).
DatasetManifest without_failures(const DatasetManifest& manifest, const PreprocessSummary& summary);

}  // namespace thermovis
