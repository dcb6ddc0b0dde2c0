#include "thermovis/training/experiment.hpp"

#include <cstdio>
#include <fstream>

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"
#include "thermovis/evaluation/matching.hpp"
#include "thermovis/evaluation/metrics.hpp"
#include "thermovis/model/weights.hpp"
#include "thermovis/training/trainer.hpp"

namespace thermovis {
namespace {

std::string run_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%02d", i + 1);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    f << text;
}

PairedData load_pairs(const DatasetManifest& m, const ImageLoader& load) {
    PairedData d;
    for (const auto& [v, t] : m.pairing) {
        d.visible.push_back(load(m.samples[v]));
        d.thermal.push_back(load(m.samples[t]));
    }
    return d;
}

std::vector<double> evaluate_policy(const DatasetManifest& test, GalleryPolicy policy, std::uint64_t seed,
                                    const std::map<std::string, GalleryEntry>& synthesized,
                                    const std::vector<Image>& probes, const std::vector<std::string>& truth,
                                    int workers) {
    std::vector<GalleryEntry> gallery;
    for (const Sample& s : build_gallery(test, policy, seed)) gallery.push_back(synthesized.at(s.image_path));
    return cmc_curve(match_probes(probes, gallery, workers), truth);
}

}  // namespace

std::vector<RunRecord> run_repeated(const DatasetManifest& manifest, const ImageLoader& load,
                                    const ExperimentPlan& plan, const RepeatOptions& options) {
    if (plan.n_runs < 1) throw Error(ErrorCode::invalid_argument, "n_runs must be at least 1");
    plan.model.validate();
    plan.train.validate();
    auto log = [&](const std::string& msg) {
        if (options.log) options.log(msg);
    };

    std::vector<RunRecord> records;
    for (int i = 0; i < plan.n_runs; ++i) {
        const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(i);
        const auto dir = options.checkpoint_root / run_name(i);
        std::filesystem::create_directories(dir);

        auto [train_m, test_m] = split_subjects(manifest, {plan.n_train_subjects, seed});
        RunRecord rec;
        rec.split.dataset = plan.dataset;
        rec.split.seed = seed;
        rec.split.n_train = plan.n_train_subjects;
        rec.split.gallery_policy = plan.policies;
        rec.split.train_subjects = train_m.subjects();
        rec.split.test_subjects = test_m.subjects();
        write_text(dir / "split.json", canonical_json(to_json(rec.split)) + "\n");

        Model model(plan.model, seed);
        if (options.train) {
            TrainConfig tc = plan.train;
            tc.seed = seed;
            auto [fit_m, val_m] = hold_out_validation(train_m, tc.validation_fraction, seed);
            log(run_name(i) + ": loading " + std::to_string(fit_m.pairing.size()) + " training and " +
                std::to_string(val_m.pairing.size()) + " validation pairs");
            const PairedData fit = load_pairs(fit_m, load);
            const PairedData val = load_pairs(val_m, load);
            TrainOptions to;
            to.checkpoint_dir = dir;
            to.resume = options.resume;
            to.on_epoch = [&](const EpochRecord& r) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s: epoch %d train %.6f val %.6f lr %.3g (%.1fs)",
                              run_name(i).c_str(), r.epoch, r.train_loss, r.validation_loss, r.learning_rate,
                              r.wall_seconds);
                log(buf);
            };
            const TrainResult tr = train(model, fit, val, tc, to);
            rec.history = tr.history;
            write_text(dir / "history.json", rec.history.to_json().dump(2) + "\n");
        }
        if (options.evaluate) {
            const auto best = dir / "best.tvws";
            if (!std::filesystem::exists(best)) {
                throw Error(ErrorCode::not_found, "missing upstream artifact " + best.string() + " (run train first)");
            }
            load_weights(model, WeightStore::read(best));

            std::vector<Sample> visible;
            std::vector<Image> visible_images;
            for (const Sample& s : test_m.samples) {
                if (s.modality != Modality::visible) continue;
                visible.push_back(s);
                visible_images.push_back(load(s));
            }
            log(run_name(i) + ": synthesizing " + std::to_string(visible.size()) + " gallery images");
            std::map<std::string, GalleryEntry> synthesized;
            {
                auto entries = synthesize_gallery(model, visible, visible_images, plan.workers);
                for (auto& e : entries) {
                    std::string key = e.source_path;
                    synthesized.emplace(std::move(key), std::move(e));
                }
            }
            std::vector<Image> probes;
            std::vector<std::string> truth;
            for (const Sample& s : build_probes(test_m)) {
                probes.push_back(load(s));
                truth.push_back(s.subject_id);
            }
            for (GalleryPolicy p : plan.policies) {
                rec.cmc[p] = evaluate_policy(test_m, p, seed, synthesized, probes, truth, plan.workers);
                char buf[128];
                std::snprintf(buf, sizeof buf, "%s: %s rank-1 %.4f over %zu probes", run_name(i).c_str(),
                              std::string(column_label(p)).c_str(), rec.cmc[p].front(), probes.size());
                log(buf);
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<ExperimentResult> aggregate(const ExperimentPlan& plan, const std::vector<RunRecord>& runs) {
    std::vector<ExperimentResult> out;
    for (GalleryPolicy p : plan.policies) {
        ExperimentResult r;
        r.dataset = plan.dataset;
        r.variant = plan.variant;
        r.policy = p;
        r.config_fingerprint = plan.model.fingerprint().substr(0, 16);
        for (const RunRecord& run : runs) {
            auto it = run.cmc.find(p);
            if (it == run.cmc.end()) continue;
            r.runs.push_back(it->second);
            r.run_descriptors.push_back(run.split);
        }
        if (r.runs.empty()) continue;
        finalize_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace thermovis
