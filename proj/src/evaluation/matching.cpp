#include "thermovis/evaluation/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermovis/core/error.hpp"
#include "thermovis/core/parallel.hpp"
#include "thermovis/model/image_tensor.hpp"

namespace thermovis {

std::vector<float> unit_feature(const Image& img) {
    double sq = 0.0;
    for (float v : img.values()) sq += static_cast<double>(v) * v;
    if (!std::isfinite(sq)) throw Error(ErrorCode::non_finite, "image has non-finite pixels");
    if (sq == 0.0) throw Error(ErrorCode::invalid_argument, "cannot normalize an all-zero image");
    const double inv = 1.0 / std::sqrt(sq);
    std::vector<float> f(img.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<float>(img.values()[i] * inv);
    return f;
}

GalleryEntry make_gallery_entry(std::string subject_id, std::string source_path, Image synthesized) {
    GalleryEntry e;
    e.subject_id = std::move(subject_id);
    e.source_path = std::move(source_path);
    e.feature = unit_feature(synthesized);
    e.synthesized = std::move(synthesized);
    return e;
}

std::vector<GalleryEntry> synthesize_gallery(const Model& model, const std::vector<Sample>& gallery,
                                             const std::vector<Image>& visible, int workers) {
    if (gallery.empty()) throw Error(ErrorCode::invalid_argument, "empty gallery");
    if (gallery.size() != visible.size()) {
        throw Error(ErrorCode::invalid_argument, "synthesize_gallery: sample and image counts differ");
    }
    std::vector<GalleryEntry> entries(gallery.size());
    parallel_for(gallery.size(), workers, [&](std::size_t i) {
        Image out = to_image(model.forward(to_tensor(visible[i])));
        entries[i] = make_gallery_entry(gallery[i].subject_id, gallery[i].image_path, std::move(out));
    });
    return entries;
}

std::vector<Match> match_feature(const std::vector<float>& probe_feature,
                                 const std::vector<GalleryEntry>& gallery) {
    if (gallery.empty()) throw Error(ErrorCode::invalid_argument, "empty gallery");
    std::map<std::string, double> best;
    for (const GalleryEntry& e : gallery) {
        if (e.feature.size() != probe_feature.size()) {
            throw Error(ErrorCode::shape_mismatch, "probe and gallery entry '" + e.source_path +
                                                       "' differ in size");
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < e.feature.size(); ++i) dot += static_cast<double>(e.feature[i]) * probe_feature[i];
        auto [it, inserted] = best.emplace(e.subject_id, dot);
        if (!inserted) it->second = std::max(it->second, dot);
    }
    std::vector<Match> ranked;
    ranked.reserve(best.size());
    for (const auto& [subject, score] : best) ranked.push_back({subject, score});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Match& a, const Match& b) { return a.score > b.score; });
    return ranked;
}

std::vector<Match> match_probe(const Image& probe, const std::vector<GalleryEntry>& gallery) {
    if (gallery.empty()) throw Error(ErrorCode::invalid_argument, "empty gallery");
    return match_feature(unit_feature(probe), gallery);
}

std::vector<std::vector<Match>> match_probes(const std::vector<Image>& probes,
                                             const std::vector<GalleryEntry>& gallery, int workers) {
    if (gallery.empty()) throw Error(ErrorCode::invalid_argument, "empty gallery");
    std::vector<std::vector<Match>> out(probes.size());
    parallel_for(probes.size(), workers, [&](std::size_t i) { out[i] = match_probe(probes[i], gallery); });
    return out;
}

}  // namespace thermovis
