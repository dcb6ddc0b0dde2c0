#pragma once

#include <vector>

#include <json.hpp>

namespace thermovis {

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double learning_rate = 0.0;  // rate used during the epoch
    double wall_seconds = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;

    /// Epochs numbered 1, 2, ... and learning rate never increasing.
    void validate() const;

    nlohmann::json to_json() const;
    static TrainHistory from_json(const nlohmann::json& j);

    bool operator==(const TrainHistory&) const = default;
};

}  // namespace thermovis
