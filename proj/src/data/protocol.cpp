#include "thermovis/data/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermovis/core/error.hpp"
#include "thermovis/core/random.hpp"

namespace thermovis {

namespace {
constexpr std::uint64_t kSplitSalt = 0x5b1;
constexpr std::uint64_t kValidationSalt = 0x7a1;
constexpr std::uint64_t kGallerySalt = 0x9a1;
}  // namespace

std::pair<DatasetManifest, DatasetManifest> split_subjects(const DatasetManifest& manifest,
                                                           const SplitConfig& cfg) {
    auto subjects = manifest.subjects();
    if (cfg.n_train_subjects < 1 || static_cast<std::size_t>(cfg.n_train_subjects) >= subjects.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "split_subjects: n_train_subjects must be in [1, " +
                        std::to_string(subjects.size()) + "), got " + std::to_string(cfg.n_train_subjects));
    }
    Rng rng(mix_seed(cfg.seed, kSplitSalt));
    rng.shuffle(subjects);
    const auto n = static_cast<std::size_t>(cfg.n_train_subjects);
    std::vector<std::string> train(subjects.begin(), subjects.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<std::string> test(subjects.begin() + static_cast<std::ptrdiff_t>(n), subjects.end());
    return {manifest.restrict_to(train), manifest.restrict_to(test)};
}

std::pair<DatasetManifest, DatasetManifest> hold_out_validation(const DatasetManifest& manifest,
                                                                double fraction,
                                                                std::uint64_t seed) {
    const std::size_t total = manifest.pairing.size();
    if (total < 2) {
        throw Error(ErrorCode::invalid_argument, "hold_out_validation: need at least two pairs");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "hold_out_validation: fraction must be in (0, 1)");
    }
    const auto n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total))), 1, total - 1);

    std::map<std::string, std::vector<std::size_t>> by_subject;
    for (std::size_t i = 0; i < total; ++i) {
        by_subject[manifest.samples[manifest.pairing[i].first].subject_id].push_back(i);
    }
    Rng rng(mix_seed(seed, kValidationSalt));
    for (auto& [subject, ids] : by_subject) rng.shuffle(ids);

    std::vector<std::size_t> val, train;
    std::vector<bool> taken(total, false);
    for (std::size_t round = 0; val.size() < n_val; ++round) {
        for (auto& [subject, ids] : by_subject) {
            if (round < ids.size() && val.size() < n_val) {
                val.push_back(ids[round]);
                taken[ids[round]] = true;
            }
        }
    }
    for (std::size_t i = 0; i < total; ++i) {
        if (!taken[i]) train.push_back(i);
    }
    return {manifest.select_pairs(train), manifest.select_pairs(val)};
}

std::string_view to_string(GalleryPolicy p) {
    switch (p) {
        case GalleryPolicy::one_per_subject: return "one_per_subject";
        case GalleryPolicy::two_per_subject: return "two_per_subject";
        case GalleryPolicy::all_per_subject: return "all_per_subject";
    }
    return "all_per_subject";
}

std::string_view column_label(GalleryPolicy p) {
    switch (p) {
        case GalleryPolicy::one_per_subject: return "1/subject";
        case GalleryPolicy::two_per_subject: return "2/subject";
        case GalleryPolicy::all_per_subject: return "all/subject";
    }
    return "all/subject";
}

GalleryPolicy parse_gallery_policy(std::string_view text) {
    if (text == "one_per_subject" || text == "1" || text == "one") return GalleryPolicy::one_per_subject;
    if (text == "two_per_subject" || text == "2" || text == "two") return GalleryPolicy::two_per_subject;
    if (text == "all_per_subject" || text == "all") return GalleryPolicy::all_per_subject;
    throw Error(ErrorCode::invalid_argument, "unknown gallery policy '" + std::string(text) + "'");
}

std::vector<Sample> build_gallery(const DatasetManifest& test, GalleryPolicy policy,
                                  std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> visible;
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
        if (test.samples[i].modality == Modality::visible) visible[test.samples[i].subject_id].push_back(i);
    }
    if (visible.empty()) throw Error(ErrorCode::invalid_argument, "build_gallery: empty test manifest");

    std::vector<Sample> gallery;
    if (policy == GalleryPolicy::all_per_subject) {
        for (const auto& [subject, ids] : visible) {
            for (std::size_t i : ids) gallery.push_back(test.samples[i]);
        }
        return gallery;
    }

    const std::size_t per_subject = policy == GalleryPolicy::one_per_subject ? 1 : 2;
    Rng rng(mix_seed(seed, kGallerySalt + per_subject));
    for (auto& [subject, ids] : visible) {
        if (ids.size() < per_subject) {
            throw Error(ErrorCode::invalid_argument,
                        "build_gallery: subject '" + subject + "' has " + std::to_string(ids.size()) +
                            " visible image(s), policy " + std::string(to_string(policy)) + " needs " +
                            std::to_string(per_subject));
        }
        auto chosen = ids;
        rng.shuffle(chosen);
        chosen.resize(per_subject);
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) gallery.push_back(test.samples[i]);
    }
    return gallery;
}

std::vector<Sample> build_probes(const DatasetManifest& test) {
    std::vector<Sample> probes;
    for (const auto& s : test.samples) {
        if (s.modality == Modality::thermal) probes.push_back(s);
    }
    if (probes.empty()) throw Error(ErrorCode::invalid_argument, "build_probes: no thermal samples");
    return probes;
}

nlohmann::json to_json(const SplitDescriptor& d) {
    nlohmann::json policies = nlohmann::json::array();
    for (auto p : d.gallery_policy) policies.push_back(std::string(to_string(p)));
    return {{"dataset", d.dataset},         {"seed", d.seed},
            {"n_train", d.n_train},         {"gallery_policy", policies},
            {"train_subjects", d.train_subjects}, {"test_subjects", d.test_subjects}};
}

SplitDescriptor split_descriptor_from_json(const nlohmann::json& j) {
    SplitDescriptor d;
    try {
        d.dataset = j.at("dataset").get<std::string>();
        d.seed = j.at("seed").get<std::uint64_t>();
        d.n_train = j.at("n_train").get<int>();
        for (const auto& p : j.at("gallery_policy")) d.gallery_policy.push_back(parse_gallery_policy(p.get<std::string>()));
        d.train_subjects = j.value("train_subjects", std::vector<std::string>{});
        d.test_subjects = j.value("test_subjects", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("split descriptor: ") + e.what());
    }
    return d;
}

}  // namespace thermovis
