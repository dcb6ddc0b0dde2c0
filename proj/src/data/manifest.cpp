#include "thermovis/data/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "thermovis/core/error.hpp"

namespace thermovis {

namespace fs = std::filesystem;

std::string_view to_string(Modality m) {
    return m == Modality::visible ? "visible" : "thermal";
}

Modality parse_modality(std::string_view text) {
    if (text == "visible") return Modality::visible;
    if (text == "thermal") return Modality::thermal;
    throw Error(ErrorCode::parse_error, "unknown modality '" + std::string(text) + "'");
}

std::string_view to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::carl: return "carl";
        case DatasetKind::undx1: return "undx1";
        case DatasetKind::eurecom: return "eurecom";
        case DatasetKind::generic: return "generic";
    }
    return "generic";
}

DatasetKind parse_dataset_kind(std::string_view text) {
    if (text == "carl") return DatasetKind::carl;
    if (text == "undx1") return DatasetKind::undx1;
    if (text == "eurecom") return DatasetKind::eurecom;
    if (text == "generic") return DatasetKind::generic;
    throw Error(ErrorCode::invalid_argument, "unknown dataset kind '" + std::string(text) + "'");
}

const std::vector<std::string>& eurecom_excluded_variations() {
    static const std::vector<std::string> tags = {
        "lights_off", "eyeglasses", "sunglasses", "occlusion_mouth",
        "occlusion_eye", "pose_left_30", "pose_right_30",
    };
    return tags;
}

std::vector<std::string> DatasetManifest::subjects() const {
    std::set<std::string> ids;
    for (const auto& s : samples) ids.insert(s.subject_id);
    return {ids.begin(), ids.end()};
}

std::size_t DatasetManifest::count(Modality m) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [m](const Sample& s) { return s.modality == m; }));
}

DatasetManifest DatasetManifest::restrict_to(const std::vector<std::string>& keep) const {
    const std::set<std::string> wanted(keep.begin(), keep.end());
    std::vector<std::size_t> pair_ids;
    for (std::size_t i = 0; i < pairing.size(); ++i) {
        if (wanted.contains(samples[pairing[i].first].subject_id)) pair_ids.push_back(i);
    }
    return select_pairs(pair_ids);
}

DatasetManifest DatasetManifest::select_pairs(const std::vector<std::size_t>& pair_indices) const {
    DatasetManifest out;
    out.name = name;
    out.root = root;
    std::vector<std::size_t> sorted = pair_indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Sample> picked;
    for (std::size_t p : sorted) {
        picked.push_back(samples.at(pairing.at(p).first));
        picked.push_back(samples.at(pairing.at(p).second));
    }
    return make_manifest(name, root, std::move(picked));
}

DatasetManifest make_manifest(std::string name, fs::path root, std::vector<Sample> samples,
                              std::vector<std::string>* unpaired) {
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        return std::tie(a.subject_id, a.modality, a.variation_tag, a.image_path) <
               std::tie(b.subject_id, b.modality, b.variation_tag, b.image_path);
    });

    std::set<std::string> paths;
    using Key = std::tuple<std::string, std::string>;
    std::map<Key, std::size_t> visible, thermal;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!paths.insert(s.image_path).second) {
            throw Error(ErrorCode::format_error, "duplicate image path '" + s.image_path + "'");
        }
        auto& side = s.modality == Modality::visible ? visible : thermal;
        if (!side.emplace(Key{s.subject_id, s.variation_tag}, i).second) {
            throw Error(ErrorCode::format_error,
                        "subject '" + s.subject_id + "' has two " + std::string(to_string(s.modality)) +
                            " images with variation tag '" + s.variation_tag + "'");
        }
    }

    std::vector<bool> keep(samples.size(), false);
    for (const auto& [key, vi] : visible) {
        if (const auto it = thermal.find(key); it != thermal.end()) {
            keep[vi] = true;
            keep[it->second] = true;
        }
    }

    DatasetManifest m;
    m.name = std::move(name);
    m.root = std::move(root);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (keep[i]) {
            m.samples.push_back(std::move(samples[i]));
        } else if (unpaired) {
            unpaired->push_back(samples[i].image_path);
        }
    }
    std::map<Key, std::size_t> thermal_index;
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        const auto& s = m.samples[i];
        if (s.modality == Modality::thermal) thermal_index[{s.subject_id, s.variation_tag}] = i;
    }
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        const auto& s = m.samples[i];
        if (s.modality == Modality::visible) {
            m.pairing.emplace_back(i, thermal_index.at({s.subject_id, s.variation_tag}));
        }
    }
    return m;
}

void validate_manifest(const DatasetManifest& m) {
    std::set<std::string> paths;
    for (const auto& s : m.samples) {
        if (!paths.insert(s.image_path).second) {
            throw Error(ErrorCode::format_error, "duplicate image path '" + s.image_path + "'");
        }
    }
    std::vector<int> used(m.samples.size(), 0);
    for (const auto& [v, t] : m.pairing) {
        if (v >= m.samples.size() || t >= m.samples.size()) {
            throw Error(ErrorCode::format_error, "pairing index out of range");
        }
        const auto& a = m.samples[v];
        const auto& b = m.samples[t];
        if (a.modality != Modality::visible || b.modality != Modality::thermal ||
            a.subject_id != b.subject_id || a.variation_tag != b.variation_tag) {
            throw Error(ErrorCode::format_error,
                        "pairing links mismatched samples '" + a.image_path + "' and '" + b.image_path + "'");
        }
        if (++used[v] > 1 || ++used[t] > 1) {
            throw Error(ErrorCode::format_error, "sample appears in more than one pair");
        }
    }
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_image_file(const fs::path& p) {
    static const std::set<std::string> exts = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"};
    return exts.contains(lower(p.extension().string()));
}

std::optional<Modality> modality_dir(const std::string& name) {
    const auto n = lower(name);
    if (n == "visible" || n == "vis" || n == "rgb") return Modality::visible;
    if (n == "thermal" || n == "lwir") return Modality::thermal;
    return std::nullopt;
}

bool excluded_for(DatasetKind kind, const std::string& tag) {
    if (kind != DatasetKind::eurecom) return false;
    const auto t = lower(tag);
    for (const auto& token : eurecom_excluded_variations()) {
        if (t.find(token) != std::string::npos) return true;
    }
    return false;
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    return entries;
}

}  // namespace

LoadResult load_manifest(const fs::path& root, DatasetKind kind, const LoadOptions& options) {
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::not_found, "dataset root is not a directory: " + root.string());
    }
    LoadResult result;
    std::vector<Sample> samples;
    for (const auto& subject_dir : sorted_entries(root)) {
        if (!fs::is_directory(subject_dir)) continue;
        const auto subject = subject_dir.filename().string();
        for (const auto& mod_dir : sorted_entries(subject_dir)) {
            if (!fs::is_directory(mod_dir)) continue;
            const auto dir_name = mod_dir.filename().string();
            const auto modality = modality_dir(dir_name);
            if (!modality) {
                if (lower(dir_name) != "nir") {
                    result.warnings.push_back("ignoring directory " +
                                              fs::relative(mod_dir, root).generic_string());
                }
                continue;
            }
            for (const auto& file : sorted_entries(mod_dir)) {
                if (!fs::is_regular_file(file) || !is_image_file(file)) continue;
                const auto tag = file.stem().string();
                if (excluded_for(kind, tag)) continue;
                samples.push_back(Sample{subject, *modality, tag,
                                         fs::relative(file, root).generic_string(), std::nullopt});
            }
        }
    }
    if (samples.empty()) {
        throw Error(ErrorCode::not_found, "no samples found under " + root.string());
    }

    std::vector<std::string> unpaired;
    result.manifest = make_manifest(std::string(to_string(kind)) + ":" + root.filename().string(),
                                    root, std::move(samples), &unpaired);
    for (const auto& p : unpaired) result.warnings.push_back("unpaired image skipped: " + p);
    if (result.manifest.samples.empty()) {
        throw Error(ErrorCode::not_found, "no visible/thermal pairs found under " + root.string());
    }

    const fs::path lm_path = root / options.landmark_file;
    if (fs::is_regular_file(lm_path)) {
        attach_landmarks(result.manifest, read_landmark_file(lm_path.string()));
    }
    if (options.require_landmarks) {
        std::vector<std::string> missing;
        for (const auto& s : result.manifest.samples) {
            if (!s.landmarks) missing.push_back(s.image_path);
        }
        if (!missing.empty()) {
            std::string msg = std::to_string(missing.size()) + " image(s) lack landmarks:";
            for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 10); ++i) {
                msg += " " + missing[i];
            }
            if (missing.size() > 10) msg += " ...";
            throw Error(ErrorCode::not_found, msg);
        }
    }
    return result;
}

void attach_landmarks(DatasetManifest& manifest, const LandmarkTable& table) {
    for (auto& s : manifest.samples) {
        if (const auto it = table.find(s.image_path); it != table.end()) s.landmarks = it->second;
    }
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
    std::ostringstream out;
    out << "subject_id,modality,variation_tag,image_path\n";
    for (const auto& s : manifest.samples) {
        for (const auto* field : {&s.subject_id, &s.variation_tag, &s.image_path}) {
            if (field->find_first_of(",\"\n\r") != std::string::npos) {
                throw Error(ErrorCode::invalid_argument,
                            "manifest field contains a CSV delimiter: '" + *field + "'");
            }
        }
        out << s.subject_id << ',' << to_string(s.modality) << ',' << s.variation_tag << ','
            << s.image_path << '\n';
    }
    return out.str();
}

DatasetManifest manifest_from_csv(std::string_view text, std::string name, fs::path root) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<Sample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != "subject_id,modality,variation_tag,image_path") {
                throw Error(ErrorCode::parse_error, "manifest CSV: unexpected header");
            }
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != 4) {
            throw Error(ErrorCode::parse_error,
                        "manifest CSV line " + std::to_string(line_no) + ": expected 4 fields");
        }
        samples.push_back(Sample{fields[0], parse_modality(fields[1]), fields[2], fields[3], std::nullopt});
    }
    return make_manifest(std::move(name), std::move(root), std::move(samples));
}

}  // namespace thermovis
