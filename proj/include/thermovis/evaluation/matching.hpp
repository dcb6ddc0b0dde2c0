#pragma once

#include <string>
#include <vector>

#include "thermovis/data/manifest.hpp"
#include "thermovis/imaging/image.hpp"
#include "thermovis/model/unet.hpp"

namespace thermovis {

struct GalleryEntry {
    std::string subject_id;
    std::string source_path;  // visible image the entry was synthesized from
    Image synthesized;
    std::vector<float> feature;  // unit-norm flattened synthesized image
};

struct Match {
    std::string subject_id;
    double score = 0.0;

    bool operator==(const Match&) const = default;
};

/// Flattened pixels scaled to unit Euclidean norm (accumulated in double).
/// Throws on an all-zero or non-finite image.
std::vector<float> unit_feature(const Image& img);

/// Runs every gallery image through the model; `visible[i]` is the
/// preprocessed image of `gallery[i]`. Images are processed one at a time on
/// `workers` threads, entries keep gallery order.
std::vector<GalleryEntry> synthesize_gallery(const Model& model, const std::vector<Sample>& gallery,
                                             const std::vector<Image>& visible, int workers = 1);

/// Entry from an already synthesized image.
GalleryEntry make_gallery_entry(std::string subject_id, std::string source_path, Image synthesized);

/// Cosine similarity against every entry, max per subject, sorted by
/// descending score with ties broken by ascending subject id.
std::vector<Match> match_probe(const Image& probe, const std::vector<GalleryEntry>& gallery);
std::vector<Match> match_feature(const std::vector<float>& probe_feature,
                                 const std::vector<GalleryEntry>& gallery);

/// match_probe for every probe, fanned out over `workers` threads; results
/// keep probe order.
std::vector<std::vector<Match>> match_probes(const std::vector<Image>& probes,
                                             const std::vector<GalleryEntry>& gallery, int workers = 1);

}  // namespace thermovis
