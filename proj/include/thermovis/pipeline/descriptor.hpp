#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermovis/data/manifest.hpp"
#include "thermovis/data/protocol.hpp"
#include "thermovis/model/config.hpp"
#include "thermovis/training/config.hpp"

namespace thermovis {

/// Preprocessing chain applied to every image, in this order:
/// mean filter -> DoG -> alignment (or plain resize) -> down to degrade_size
/// -> back up to size.
struct PreprocessFlags {
    bool mean_filter = true;
    int mean_kernel = 3;
    bool dog = true;
    double dog_sigma_inner = 1.0;
    double dog_sigma_outer = 2.0;
    bool align = true;
    bool degrade = true;
    int degrade_size = 112;
    int size = 224;

    void validate() const;
    nlohmann::json to_json() const;
    static PreprocessFlags from_json(const nlohmann::json& j, PreprocessFlags base);
    static PreprocessFlags from_json(const nlohmann::json& j) { return from_json(j, PreprocessFlags{}); }
    bool operator==(const PreprocessFlags&) const = default;
};

/// Everything that determines a run. Every field has a default; a descriptor
/// file only needs the fields it changes.
struct RunDescriptor {
    DatasetKind dataset_kind = DatasetKind::generic;
    std::string dataset_root;
    PreprocessFlags preprocess;
    ModelConfig model;
    TrainConfig train;
    int n_train_subjects = 0;  // 0: dataset default
    std::vector<GalleryPolicy> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
    std::string metric = "cosine";
    int n_runs = 10;
    std::uint64_t seed = 0;
    std::string variant;  // report row label; empty: derived from the flags
    std::string out = "runs";
    int workers = 1;

    void validate() const;

    nlohmann::json to_json() const;
    /// Fields present in `j` override those of `base`.
    static RunDescriptor from_json(const nlohmann::json& j, const RunDescriptor& base);
    static RunDescriptor from_json(const nlohmann::json& j) { return from_json(j, RunDescriptor{}); }

    /// short_hash of the descriptor without `out` and `workers`, which do not
    /// change results.
    std::string hash() const;

    std::string dataset_name() const { return std::string(to_string(dataset_kind)); }
    std::string variant_label() const;
    /// Training subjects used for a dataset with `subjects` identities:
    /// carl 20, undx1 41, eurecom 30, generic round(0.6 * subjects).
    int train_subjects_for(std::size_t subjects) const;
};

RunDescriptor read_descriptor(const std::filesystem::path& path, const RunDescriptor& base = {});

/// Applies "a.b.c=value" (value parsed as JSON, else taken as a string) to the
/// JSON form of a descriptor.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace thermovis
