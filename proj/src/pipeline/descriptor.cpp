#include "thermovis/pipeline/descriptor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"

namespace thermovis {

void PreprocessFlags::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, "preprocess: " + msg); };
    if (mean_kernel < 1 || mean_kernel % 2 == 0) fail("mean_kernel must be odd and positive");
    if (!(dog_sigma_inner > 0.0 && dog_sigma_inner < dog_sigma_outer)) fail("need 0 < dog_sigma_inner < dog_sigma_outer");
    if (size < 1 || degrade_size < 1) fail("sizes must be positive");
}

nlohmann::json PreprocessFlags::to_json() const {
    return {{"mean_filter", mean_filter},   {"mean_kernel", mean_kernel},
            {"dog", dog},                   {"dog_sigma_inner", dog_sigma_inner},
            {"dog_sigma_outer", dog_sigma_outer}, {"align", align},
            {"degrade", degrade},           {"degrade_size", degrade_size},
            {"size", size}};
}

PreprocessFlags PreprocessFlags::from_json(const nlohmann::json& j, PreprocessFlags f) {
    f.mean_filter = j.value("mean_filter", f.mean_filter);
    f.mean_kernel = j.value("mean_kernel", f.mean_kernel);
    f.dog = j.value("dog", f.dog);
    f.dog_sigma_inner = j.value("dog_sigma_inner", f.dog_sigma_inner);
    f.dog_sigma_outer = j.value("dog_sigma_outer", f.dog_sigma_outer);
    f.align = j.value("align", f.align);
    f.degrade = j.value("degrade", f.degrade);
    f.degrade_size = j.value("degrade_size", f.degrade_size);
    f.size = j.value("size", f.size);
    return f;
}

void RunDescriptor::validate() const {
    preprocess.validate();
    model.validate();
    train.validate();
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, "descriptor: " + msg); };
    if (preprocess.size != model.input_size) fail("preprocess.size must equal model.input_size");
    if (model.output_channels != 1) fail("thermal targets have one channel; model.output_channels must be 1");
    if (n_train_subjects < 0) fail("n_train_subjects must not be negative");
    if (policies.empty()) fail("at least one gallery policy is required");
    if (metric != "cosine") fail("unsupported similarity metric '" + metric + "'");
    if (n_runs < 1) fail("n_runs must be at least 1");
    if (workers < 1) fail("workers must be at least 1");
}

nlohmann::json RunDescriptor::to_json() const {
    nlohmann::json policy_names = nlohmann::json::array();
    for (GalleryPolicy p : policies) policy_names.push_back(std::string(to_string(p)));
    return {{"dataset", {{"kind", std::string(to_string(dataset_kind))}, {"root", dataset_root}}},
            {"preprocess", preprocess.to_json()},
            {"model", model.to_json()},
            {"train", train.to_json()},
            {"split", {{"n_train_subjects", n_train_subjects}}},
            {"evaluation", {{"gallery_policies", policy_names}, {"metric", metric}}},
            {"n_runs", n_runs},
            {"seed", seed},
            {"variant", variant},
            {"out", out},
            {"workers", workers}};
}

RunDescriptor RunDescriptor::from_json(const nlohmann::json& j, const RunDescriptor& base) {
    RunDescriptor d = base;
    try {
        if (!j.is_object()) throw Error(ErrorCode::config_error, "descriptor must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            static const std::vector<std::string> known = {"dataset", "preprocess", "model", "train", "split",
                                                           "evaluation", "n_runs", "seed", "variant", "out",
                                                           "workers"};
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw Error(ErrorCode::config_error, "descriptor: unknown field '" + key + "'");
            }
        }
        if (j.contains("dataset")) {
            const auto& ds = j["dataset"];
            if (ds.contains("kind")) d.dataset_kind = parse_dataset_kind(ds["kind"].get<std::string>());
            d.dataset_root = ds.value("root", d.dataset_root);
        }
        if (j.contains("preprocess")) d.preprocess = PreprocessFlags::from_json(j["preprocess"], d.preprocess);
        if (j.contains("model")) {
            nlohmann::json merged = d.model.to_json();
            merged.merge_patch(j["model"]);
            d.model = ModelConfig::from_json(merged);
        }
        if (j.contains("train")) {
            nlohmann::json merged = d.train.to_json();
            merged.merge_patch(j["train"]);
            d.train = TrainConfig::from_json(merged);
        }
        if (j.contains("split")) d.n_train_subjects = j["split"].value("n_train_subjects", d.n_train_subjects);
        if (j.contains("evaluation")) {
            const auto& ev = j["evaluation"];
            if (ev.contains("gallery_policies")) {
                d.policies.clear();
                for (const auto& p : ev["gallery_policies"]) d.policies.push_back(parse_gallery_policy(p.get<std::string>()));
            }
            d.metric = ev.value("metric", d.metric);
        }
        d.n_runs = j.value("n_runs", d.n_runs);
        d.seed = j.value("seed", d.seed);
        d.variant = j.value("variant", d.variant);
        d.out = j.value("out", d.out);
        d.workers = j.value("workers", d.workers);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("descriptor: ") + e.what());
    }
    return d;
}

std::string RunDescriptor::hash() const {
    nlohmann::json j = to_json();
    j.erase("out");
    j.erase("workers");
    return short_hash(j);
}

std::string RunDescriptor::variant_label() const {
    if (!variant.empty()) return variant;
    std::string label(to_string(model.decoder_variant));
    if (preprocess.dog) label += " + DoG";
    if (preprocess.align) label += " (aligned)";
    return label;
}

int RunDescriptor::train_subjects_for(std::size_t subjects) const {
    if (n_train_subjects > 0) return n_train_subjects;
    switch (dataset_kind) {
        case DatasetKind::carl: return 20;
        case DatasetKind::undx1: return 41;
        case DatasetKind::eurecom: return 30;
        case DatasetKind::generic: break;
    }
    return static_cast<int>(std::lround(0.6 * static_cast<double>(subjects)));
}

RunDescriptor read_descriptor(const std::filesystem::path& path, const RunDescriptor& base) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::not_found, "cannot open descriptor " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
    }
    return RunDescriptor::from_json(j, base);
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::invalid_argument, "override must look like key.path=value: '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        value = text;
    }
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw Error(ErrorCode::invalid_argument, "bad override key '" + key + "'");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

}  // namespace thermovis
