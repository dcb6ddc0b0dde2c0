#pragma once

#include <cstdint>

#include <json.hpp>

namespace thermovis {

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 32;
    /// Samples per forward/backward pass; gradients of the micro-batches are
    /// accumulated into one optimizer step per batch. Batch-norm statistics
    /// are those of the micro-batch. 0 means "same as batch_size".
    int micro_batch = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int plateau_patience = 5;
    double min_improvement = 1e-4;  // relative
    int max_epochs = 200;
    double early_stop_lr = 1e-5;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
    int effective_micro_batch() const { return micro_batch > 0 ? micro_batch : batch_size; }

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);

    bool operator==(const TrainConfig&) const = default;
};

}  // namespace thermovis
