#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "thermovis/data/manifest.hpp"
#include "thermovis/data/protocol.hpp"
#include "thermovis/evaluation/report.hpp"
#include "thermovis/imaging/image.hpp"
#include "thermovis/model/config.hpp"
#include "thermovis/training/config.hpp"
#include "thermovis/training/history.hpp"

namespace thermovis {

/// Returns the model-ready image of a sample: visible images with the model's
/// input channel count, thermal images with one channel.
using ImageLoader = std::function<Image(const Sample&)>;

struct ExperimentPlan {
    std::string dataset;
    std::string variant;
    ModelConfig model;
    TrainConfig train;  // train.seed is replaced by the run seed
    int n_train_subjects = 0;
    std::vector<GalleryPolicy> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
    int n_runs = 10;
    std::uint64_t base_seed = 0;
    int workers = 1;
};

struct RunRecord {
    SplitDescriptor split;
    TrainHistory history;
    std::map<GalleryPolicy, std::vector<double>> cmc;
};

struct RepeatOptions {
    /// Per-run checkpoints go to <checkpoint_root>/run_NN/.
    std::filesystem::path checkpoint_root;
    bool train = true;
    bool evaluate = true;
    /// Continue interrupted runs from their last checkpoint.
    bool resume = true;
    std::function<void(const std::string&)> log;
};

/// Run i (0-based) uses seed base_seed + i for its subject split, gallery
/// choice, weight initialization and batch order. Training writes
/// run_NN/{split.json, history.json, last.tvck, best.tvws}; evaluation loads
/// best.tvws and scores every requested gallery policy against all thermal
/// probes of the test subjects.
std::vector<RunRecord> run_repeated(const DatasetManifest& manifest, const ImageLoader& load,
                                    const ExperimentPlan& plan, const RepeatOptions& options);

/// One ExperimentResult per policy, averaged over the runs.
std::vector<ExperimentResult> aggregate(const ExperimentPlan& plan, const std::vector<RunRecord>& runs);

}  // namespace thermovis
