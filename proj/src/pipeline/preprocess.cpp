#include "thermovis/pipeline/preprocess.hpp"

#include <fstream>
#include <iterator>
#include <mutex>
#include <set>

#include "thermovis/alignment/similarity.hpp"
#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"
#include "thermovis/core/parallel.hpp"
#include "thermovis/imaging/filters.hpp"
#include "thermovis/imaging/io.hpp"

namespace thermovis {

namespace fs = std::filesystem;

Image preprocess_image(const Image& raw, Modality modality, const std::optional<LandmarkSet>& landmarks,
                       const PreprocessFlags& flags, int input_channels) {
    flags.validate();
    Image img = modality == Modality::thermal ? to_grayscale(raw) : raw;
    if (flags.mean_filter) img = mean_filter(img, flags.mean_kernel);
    if (flags.dog) img = dog_filter(to_grayscale(img), flags.dog_sigma_inner, flags.dog_sigma_outer);
    if (flags.align) {
        if (!landmarks) throw Error(ErrorCode::not_found, "alignment requested but the image has no landmarks");
        LandmarkSet tmpl = default_template();
        if (flags.size != 224) {
            const double s = flags.size / 224.0;
            for (Point2& p : tmpl.points) p = {p.x * s, p.y * s};
        }
        img = align_face(img, *landmarks, tmpl, flags.size, flags.size);
    } else if (img.width() != flags.size || img.height() != flags.size) {
        img = resize_bilinear(img, flags.size, flags.size);
    }
    if (flags.degrade) img = degrade_resolution(img, flags.degrade_size, flags.size);
    if (modality == Modality::visible) {
        if (input_channels == 1) img = to_grayscale(img);
        else if (img.channels() == 1) img = expand_channels(img, input_channels);
    }
    return img;
}

nlohmann::json PreprocessSummary::to_json() const {
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& f : failures) fails.push_back({{"image", f.image_path}, {"error", f.message}});
    return {{"total", total}, {"processed", processed}, {"cached", cached}, {"failed", failures.size()},
            {"failures", fails}};
}

namespace {

std::string file_digest(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return sha256_hex(std::span<const std::uint8_t>(bytes));
}

}  // namespace

PreprocessSummary preprocess_dataset(const DatasetManifest& manifest, const PreprocessFlags& flags,
                                     int input_channels, const fs::path& cache_dir, int workers) {
    flags.validate();
    if (flags.align) {
        std::vector<std::string> missing;
        for (const Sample& s : manifest.samples) {
            if (!s.landmarks) missing.push_back(s.image_path);
        }
        if (!missing.empty()) {
            std::string msg = "alignment is on but " + std::to_string(missing.size()) + " image(s) lack landmarks:";
            for (const auto& m : missing) msg += " " + m;
            throw Error(ErrorCode::not_found, msg);
        }
    }
    fs::create_directories(cache_dir);

    const std::size_t n = manifest.samples.size();
    std::vector<fs::path> outputs(n);
    std::vector<int> status(n, 0);  // 1 processed, 2 cached, -1 failed
    std::vector<std::string> errors(n);
    parallel_for(n, workers, [&](std::size_t i) {
        const Sample& s = manifest.samples[i];
        try {
            const fs::path src = manifest.root / s.image_path;
            nlohmann::json key = {{"source", file_digest(src)},
                                  {"modality", std::string(to_string(s.modality))},
                                  {"flags", flags.to_json()},
                                  {"channels", s.modality == Modality::visible ? input_channels : 1}};
            if (flags.align && s.landmarks) {
                nlohmann::json pts = nlohmann::json::array();
                for (const Point2& p : s.landmarks->points) pts.push_back({p.x, p.y});
                key["landmarks"] = pts;
            }
            const fs::path out = cache_dir / (short_hash(key) + ".tvimg");
            outputs[i] = out;
            if (fs::exists(out)) {
                status[i] = 2;
                return;
            }
            const Image img = preprocess_image(load_image(src), s.modality, s.landmarks, flags, input_channels);
            const fs::path tmp = out.string() + ".tmp" + std::to_string(i);
            save_raw(tmp, img);
            fs::rename(tmp, out);
            status[i] = 1;
        } catch (const std::exception& e) {
            status[i] = -1;
            errors[i] = e.what();
        }
    });

    PreprocessSummary summary;
    summary.total = n;
    for (std::size_t i = 0; i < n; ++i) {
        const Sample& s = manifest.samples[i];
        if (status[i] < 0) {
            summary.failures.push_back({s.image_path, errors[i]});
            continue;
        }
        summary.files[s.image_path] = outputs[i];
        (status[i] == 1 ? summary.processed : summary.cached) += 1;
    }
    return summary;
}

DatasetManifest without_failures(const DatasetManifest& manifest, const PreprocessSummary& summary) {
    if (summary.failures.empty()) return manifest;
    std::set<std::string> failed;
    for (const auto& f : summary.failures) failed.insert(f.image_path);
    std::vector<Sample> keep;
    for (const Sample& s : manifest.samples) {
        if (!failed.count(s.image_path)) keep.push_back(s);
    }
    return make_manifest(manifest.name, manifest.root, std::move(keep));
}

}  // namespace thermovis
