#pragma once

// Stand-ins for the restricted datasets: in-memory manifests and empty-file
// directory trees with the published subject and image counts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "thermovis/data/manifest.hpp"

namespace stubs {

inline std::string subject_name(int s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%03d", s);
    return buf;
}

inline std::string tag_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "img%03d", i);
    return buf;
}

/// One visible/thermal pair per image; images_per_subject[s] pairs for subject s.
inline thermovis::DatasetManifest manifest(const std::string& name, const std::vector<int>& images_per_subject) {
    std::vector<thermovis::Sample> samples;
    for (std::size_t s = 0; s < images_per_subject.size(); ++s) {
        const auto subject = subject_name(static_cast<int>(s));
        for (int i = 0; i < images_per_subject[s]; ++i) {
            const auto tag = tag_name(i);
            samples.push_back({subject, thermovis::Modality::visible, tag, subject + "/visible/" + tag + ".png", {}});
            samples.push_back({subject, thermovis::Modality::thermal, tag, subject + "/thermal/" + tag + ".png", {}});
        }
    }
    return thermovis::make_manifest(name, "/nonexistent/" + name, std::move(samples));
}

/// `subjects` subjects with `per_subject` pairs each.
inline thermovis::DatasetManifest uniform(const std::string& name, int subjects, int per_subject) {
    return manifest(name, std::vector<int>(static_cast<std::size_t>(subjects), per_subject));
}

/// Subject counts summing to `total`, as even as possible, each at least 2.
inline std::vector<int> spread(int subjects, int total) {
    std::vector<int> counts(static_cast<std::size_t>(subjects), total / subjects);
    for (int i = 0; i < total % subjects; ++i) ++counts[static_cast<std::size_t>(i)];
    return counts;
}

inline void touch(const std::filesystem::path& p) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << "";
}

}  // namespace stubs
