#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "thermovis/imaging/image.hpp"
#include "thermovis/model/unet.hpp"
#include "thermovis/model/weights.hpp"
#include "thermovis/training/config.hpp"
#include "thermovis/training/history.hpp"

namespace thermovis {

/// Preprocessed visible inputs and their thermal targets, index-aligned.
struct PairedData {
    std::vector<Image> visible;
    std::vector<Image> thermal;

    std::size_t size() const { return visible.size(); }
};

struct TrainOptions {
    /// Receives last.tvck (after every epoch) and best.tvws; empty disables
    /// checkpointing.
    std::filesystem::path checkpoint_dir;
    /// Continue from checkpoint_dir/last.tvck when it exists.
    bool resume = false;
    /// Return after this epoch even if the run is not finished (0 = never).
    int stop_after_epoch = 0;
    std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
    TrainHistory history;
    WeightStore best_weights;
    double best_validation_loss = 0.0;
    bool finished = false;  // false when stopped by stop_after_epoch
};

/// Mini-batch Adam on mse_loss(forward(visible), thermal). The sample order of
/// epoch e is a shuffle seeded by (cfg.seed, e), so a resumed run sees the same
/// batches as an uninterrupted one. The model is left at its final weights;
/// the best-validation weights come back in the result.
TrainResult train(Model& model, const PairedData& train_set, const PairedData& validation_set,
                  const TrainConfig& cfg, const TrainOptions& options = {});

/// Mean squared error of the model in inference mode over a whole set.
double evaluate_loss(const Model& model, const PairedData& data, int chunk = 8);

}  // namespace thermovis
