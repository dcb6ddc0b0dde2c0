#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thermovis/alignment/landmarks.hpp"

namespace thermovis {

enum class Modality { visible, thermal };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view text);

struct Sample {
    std::string subject_id;
    Modality modality = Modality::visible;
    std::string variation_tag;
    std::string image_path;  // relative to the manifest root, '/' separated
    std::optional<LandmarkSet> landmarks;

    bool operator==(const Sample&) const = default;
};

/// Samples are kept sorted by (subject, modality, variation tag, path);
/// `pairing` holds (visible index, thermal index) for every matched pair.
struct DatasetManifest {
    std::string name;
    std::filesystem::path root;
    std::vector<Sample> samples;
    std::vector<std::pair<std::size_t, std::size_t>> pairing;

    /// Sorted, de-duplicated subject ids.
    std::vector<std::string> subjects() const;
    std::size_t count(Modality m) const;
    /// Samples (and their pairs) whose subject is in `keep`.
    DatasetManifest restrict_to(const std::vector<std::string>& keep) const;
    /// Only the listed pairs (indices into `pairing`) and their samples.
    DatasetManifest select_pairs(const std::vector<std::size_t>& pair_indices) const;
};

/// Sorts samples and matches each visible sample with the thermal sample of
/// the same subject and variation tag. Unmatched samples are dropped and
/// reported through `unpaired` (when given). Throws on duplicate paths or
/// on two samples sharing subject, modality and tag.
DatasetManifest make_manifest(std::string name, std::filesystem::path root,
                              std::vector<Sample> samples,
                              std::vector<std::string>* unpaired = nullptr);

/// Structural invariants: unique paths, pairs link opposite modalities with
/// equal subject and tag, no sample in two pairs. Throws on violation.
void validate_manifest(const DatasetManifest& manifest);

enum class DatasetKind { carl, undx1, eurecom, generic };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view text);

/// Variation tags removed from the EURECOM kind (matched as substrings of
/// the lower-cased tag).
const std::vector<std::string>& eurecom_excluded_variations();

struct LoadOptions {
    bool require_landmarks = false;
    /// Annotation file relative to the dataset root; optional unless
    /// landmarks are required.
    std::string landmark_file = "landmarks.csv";
};

struct LoadResult {
    DatasetManifest manifest;
    std::vector<std::string> warnings;
};

/// Enumerates `<root>/<subject>/<modality>/<image>`. Modality directories:
/// visible|vis|rgb and thermal|lwir; `nir` is ignored. Image stems become
/// variation tags.
LoadResult load_manifest(const std::filesystem::path& root, DatasetKind kind,
                         const LoadOptions& options = {});

/// CSV with header `subject_id,modality,variation_tag,image_path`.
std::string manifest_to_csv(const DatasetManifest& manifest);
DatasetManifest manifest_from_csv(std::string_view text, std::string name,
                                  std::filesystem::path root);

/// Attaches landmarks from `table` (keyed by relative image path).
void attach_landmarks(DatasetManifest& manifest, const LandmarkTable& table);

}  // namespace thermovis
