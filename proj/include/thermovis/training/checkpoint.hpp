#pragma once

#include <filesystem>

#include "thermovis/model/weights.hpp"
#include "thermovis/training/adam.hpp"
#include "thermovis/training/history.hpp"
#include "thermovis/training/schedule.hpp"

namespace thermovis {

/// Everything needed to continue a run after epoch `history.epochs.size()`.
///
/// File layout (u32/u64/f64 little-endian):
///
///   "TVCK", u32 version (= 1)
///   u64 weight-store byte count, weight-store bytes (see WeightStore)
///   u64 Adam step, u32 tensor count, per tensor: u64 n, n f32 m, n f32 v
///   f64 learning rate, f64 best validation loss, u32 bad epochs
///   f64 best-checkpoint validation loss
///   u64 history byte count, history as UTF-8 JSON
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    WeightStore weights;
    AdamState optimizer;
    PlateauScheduler::State scheduler;
    double best_validation_loss = 0.0;  // of the best checkpoint so far
    TrainHistory history;

    int epoch() const { return static_cast<int>(history.epochs.size()); }

    std::vector<std::uint8_t> serialize() const;
    static Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

    /// Written to a temporary name and renamed, so a crash never leaves a
    /// half-written checkpoint under `path`.
    void write(const std::filesystem::path& path) const;
    static Checkpoint read(const std::filesystem::path& path);
};

}  // namespace thermovis
