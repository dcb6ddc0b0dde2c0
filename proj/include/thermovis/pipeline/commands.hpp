#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "thermovis/data/synthetic.hpp"
#include "thermovis/evaluation/report.hpp"
#include "thermovis/pipeline/descriptor.hpp"
#include "thermovis/pipeline/preprocess.hpp"
#include "thermovis/training/experiment.hpp"

namespace thermovis {

using Logger = std::function<void(const std::string&)>;

/// <out>/<descriptor hash>/ with preprocessed/, checkpoints/, results/ and
/// reports/ below it.
struct RunLayout {
    std::filesystem::path root;

    explicit RunLayout(const RunDescriptor& d);
    std::filesystem::path preprocessed() const { return root / "preprocessed"; }
    std::filesystem::path checkpoints() const { return root / "checkpoints"; }
    std::filesystem::path results() const { return root / "results"; }
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path descriptor_file() const { return root / "descriptor.json"; }
};

/// Creates the run directory and stamps descriptor.json; an existing stamp
/// that differs from `d` is ErrorCode::fingerprint_mismatch.
RunLayout prepare_run(const RunDescriptor& d);

/// Throws ErrorCode::invalid_argument for non-positive counts.
DatasetManifest cmd_synth(const SyntheticConfig& cfg, const std::filesystem::path& out);

struct PreparedDataset {
    DatasetManifest manifest;  // failed images removed
    PreprocessSummary summary;
};

PreparedDataset cmd_preprocess(const RunDescriptor& d, const Logger& log = {});

std::vector<RunRecord> cmd_train(const RunDescriptor& d, const Logger& log = {});

/// Writes results/results.json; returns one result per gallery policy.
std::vector<ExperimentResult> cmd_evaluate(const RunDescriptor& d, const Logger& log = {});

/// Reads results.json from each directory (one table, so one dataset) and
/// writes report.{txt,csv,json} into `reports_dir`. Returns the text table.
std::string cmd_report(const std::vector<std::filesystem::path>& results_dirs,
                       const std::filesystem::path& reports_dir);

}  // namespace thermovis
