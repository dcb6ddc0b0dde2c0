#include "thermovis/pipeline/commands.hpp"

#include <fstream>
#include <sstream>

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"
#include "thermovis/imaging/io.hpp"

namespace thermovis {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::not_found, "cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    f << text;
}

ExperimentPlan make_plan(const RunDescriptor& d, const DatasetManifest& manifest) {
    ExperimentPlan plan;
    plan.dataset = d.dataset_name();
    plan.variant = d.variant_label();
    plan.model = d.model;
    plan.train = d.train;
    plan.n_train_subjects = d.train_subjects_for(manifest.subjects().size());
    plan.policies = d.policies;
    plan.n_runs = d.n_runs;
    plan.base_seed = d.seed;
    plan.workers = d.workers;
    return plan;
}

ImageLoader cache_loader(const PreprocessSummary& summary) {
    return [&summary](const Sample& s) {
        auto it = summary.files.find(s.image_path);
        if (it == summary.files.end()) {
            throw Error(ErrorCode::not_found, "no preprocessed image for " + s.image_path);
        }
        return load_raw(it->second);
    };
}

}  // namespace

RunLayout::RunLayout(const RunDescriptor& d) : root(fs::path(d.out) / d.hash()) {}

RunLayout prepare_run(const RunDescriptor& d) {
    d.validate();
    RunLayout layout(d);
    for (const auto& dir : {layout.preprocessed(), layout.checkpoints(), layout.results(), layout.reports()}) {
        fs::create_directories(dir);
    }
    nlohmann::json stamp = d.to_json();
    stamp.erase("out");
    stamp.erase("workers");
    const std::string text = canonical_json(stamp) + "\n";
    if (fs::exists(layout.descriptor_file())) {
        if (read_text(layout.descriptor_file()) != text) {
            throw Error(ErrorCode::fingerprint_mismatch,
                        "descriptor/cache hash mismatch: " + layout.descriptor_file().string() +
                            " was written by a different descriptor");
        }
    } else {
        write_text(layout.descriptor_file(), text);
    }
    return layout;
}

DatasetManifest cmd_synth(const SyntheticConfig& cfg, const fs::path& out) {
    if (cfg.n_subjects < 1) throw Error(ErrorCode::invalid_argument, "synth: --subjects must be at least 1");
    if (cfg.images_per_subject < 1) throw Error(ErrorCode::invalid_argument, "synth: --images must be at least 1");
    if (cfg.size < 32) throw Error(ErrorCode::invalid_argument, "synth: --size must be at least 32");
    return generate_synthetic(cfg, out);
}

PreparedDataset cmd_preprocess(const RunDescriptor& d, const Logger& log) {
    const RunLayout layout = prepare_run(d);
    if (d.dataset_root.empty()) throw Error(ErrorCode::config_error, "descriptor: dataset.root is not set");
    LoadOptions lo;
    lo.require_landmarks = d.preprocess.align;
    LoadResult loaded = load_manifest(d.dataset_root, d.dataset_kind, lo);
    for (const auto& w : loaded.warnings) {
        if (log) log("warning: " + w);
    }
    PreparedDataset out;
    out.summary = preprocess_dataset(loaded.manifest, d.preprocess, d.model.input_channels, layout.preprocessed(),
                                     d.workers);
    for (const auto& f : out.summary.failures) {
        if (log) log("failed: " + f.image_path + ": " + f.message);
    }
    if (log) {
        log("preprocess: " + std::to_string(out.summary.processed) + " processed, " +
            std::to_string(out.summary.cached) + " cached, " + std::to_string(out.summary.failures.size()) +
            " failed");
    }
    write_text(layout.preprocessed() / "summary.json", canonical_json(out.summary.to_json()) + "\n");
    out.manifest = without_failures(loaded.manifest, out.summary);
    return out;
}

std::vector<RunRecord> cmd_train(const RunDescriptor& d, const Logger& log) {
    const PreparedDataset data = cmd_preprocess(d, log);
    const RunLayout layout(d);
    const ExperimentPlan plan = make_plan(d, data.manifest);
    RepeatOptions opt;
    opt.checkpoint_root = layout.checkpoints();
    opt.train = true;
    opt.evaluate = false;
    opt.log = log;
    return run_repeated(data.manifest, cache_loader(data.summary), plan, opt);
}

std::vector<ExperimentResult> cmd_evaluate(const RunDescriptor& d, const Logger& log) {
    const PreparedDataset data = cmd_preprocess(d, log);
    const RunLayout layout(d);
    const ExperimentPlan plan = make_plan(d, data.manifest);
    RepeatOptions opt;
    opt.checkpoint_root = layout.checkpoints();
    opt.train = false;
    opt.evaluate = true;
    opt.log = log;
    auto results = aggregate(plan, run_repeated(data.manifest, cache_loader(data.summary), plan, opt));
    nlohmann::json doc = {{"descriptor_hash", d.hash()}, {"results", nlohmann::json::array()}};
    for (auto& r : results) {
        r.descriptor_hash = d.hash();
        doc["results"].push_back(to_json(r));
    }
    write_text(layout.results() / "results.json", canonical_json(doc) + "\n");
    return results;
}

std::string cmd_report(const std::vector<fs::path>& results_dirs, const fs::path& reports_dir) {
    if (results_dirs.empty()) throw Error(ErrorCode::invalid_argument, "report: no results directories");
    std::vector<ExperimentResult> all;
    for (const fs::path& dir : results_dirs) {
        const fs::path file = dir / "results.json";
        if (!fs::exists(file)) {
            throw Error(ErrorCode::not_found, "missing upstream artifact " + file.string() + " (run evaluate first)");
        }
        for (auto& r : parse_report_json(read_text(file))) all.push_back(std::move(r));
    }
    fs::create_directories(reports_dir);
    std::string text;
    for (ReportFormat f : {ReportFormat::text, ReportFormat::csv, ReportFormat::json}) {
        const std::string doc = emit_report(all, f);
        write_text(reports_dir / ("report." + std::string(file_extension(f))), doc);
        if (f == ReportFormat::text) text = doc;
    }
    return text;
}

}  // namespace thermovis
