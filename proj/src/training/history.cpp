#include "thermovis/training/history.hpp"

#include <string>

#include "thermovis/core/error.hpp"

namespace thermovis {

void TrainHistory::validate() const {
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        if (epochs[i].epoch != static_cast<int>(i) + 1) {
            throw Error(ErrorCode::format_error, "training history: epochs are not contiguous at record " +
                                                     std::to_string(i + 1));
        }
        if (i > 0 && epochs[i].learning_rate > epochs[i - 1].learning_rate) {
            throw Error(ErrorCode::format_error,
                        "training history: learning rate increases at epoch " + std::to_string(i + 1));
        }
    }
}

nlohmann::json TrainHistory::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const EpochRecord& r : epochs) {
        arr.push_back({{"epoch", r.epoch},
                       {"train_loss", r.train_loss},
                       {"validation_loss", r.validation_loss},
                       {"learning_rate", r.learning_rate},
                       {"wall_seconds", r.wall_seconds}});
    }
    return arr;
}

TrainHistory TrainHistory::from_json(const nlohmann::json& j) {
    TrainHistory h;
    try {
        for (const auto& r : j) {
            h.epochs.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(),
                                r.at("validation_loss").get<double>(), r.at("learning_rate").get<double>(),
                                r.at("wall_seconds").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format_error, std::string("training history: ") + e.what());
    }
    h.validate();
    return h;
}

}  // namespace thermovis
