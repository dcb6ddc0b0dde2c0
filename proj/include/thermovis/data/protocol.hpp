#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thermovis/data/manifest.hpp"

namespace thermovis {

struct SplitConfig {
    int n_train_subjects = 0;
    std::uint64_t seed = 0;
};

/// Subject-disjoint split; the train subjects are a seeded random subset.
std::pair<DatasetManifest, DatasetManifest> split_subjects(const DatasetManifest& manifest,
                                                           const SplitConfig& cfg);

/// Holds out round(fraction * pairs) pairs (at least one) for validation,
/// drawn round-robin across subjects so every subject contributes evenly.
std::pair<DatasetManifest, DatasetManifest> hold_out_validation(const DatasetManifest& manifest,
                                                                double fraction,
                                                                std::uint64_t seed);

enum class GalleryPolicy { one_per_subject, two_per_subject, all_per_subject };

std::string_view to_string(GalleryPolicy p);
/// Column label used in report tables: "1/subject", "2/subject", "all/subject".
std::string_view column_label(GalleryPolicy p);
GalleryPolicy parse_gallery_policy(std::string_view text);
inline constexpr GalleryPolicy kAllPolicies[] = {GalleryPolicy::one_per_subject,
                                                 GalleryPolicy::two_per_subject,
                                                 GalleryPolicy::all_per_subject};

/// Visible gallery of the test manifest. For the 1- and 2-per-subject
/// policies the images are a seeded random choice per subject.
std::vector<Sample> build_gallery(const DatasetManifest& test, GalleryPolicy policy,
                                  std::uint64_t seed);

/// Every thermal sample of the test manifest in manifest order.
std::vector<Sample> build_probes(const DatasetManifest& test);

/// Persisted per run so a split and its galleries can be rebuilt exactly.
struct SplitDescriptor {
    std::string dataset;
    std::uint64_t seed = 0;
    int n_train = 0;
    std::vector<GalleryPolicy> gallery_policy;
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;

    bool operator==(const SplitDescriptor&) const = default;
};

nlohmann::json to_json(const SplitDescriptor& d);
SplitDescriptor split_descriptor_from_json(const nlohmann::json& j);

}  // namespace thermovis
